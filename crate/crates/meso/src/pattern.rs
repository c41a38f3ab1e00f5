//! Enumeration, admissibility filtering and taxonomy of block patterns.

use crate::error::{MesoError, Result};
use crate::modularity::BlockMatrix;

const MAX_ENUMERATION_K: usize = 4;

/// Structure class of a 2x2 block pattern.
///
/// The named classes cover every pattern with a conventional reading; the
/// remaining sign combinations get systematic `Uniform`/`Other` labels so
/// that classification is total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternClass {
    Community,
    Bipartite,
    /// Dense group `core` linked to a sparse periphery in both directions.
    CorePeriphery { core: usize },
    /// One-way flow from sparse `source` into dense `basin`.
    SourceBasin { source: usize, basin: usize },
    /// One-way flow from dense `basin` out to sparse `delta`.
    BasinDelta { basin: usize, delta: usize },
    /// One-way flow between two dense groups, `from` upstream.
    CommunityHierarchy { from: usize, to: usize },
    Uniform { dense: bool },
    Other { signature: String },
}

impl PatternClass {
    /// Short label for reports.
    pub fn label(&self) -> String {
        match self {
            PatternClass::Community => "community".into(),
            PatternClass::Bipartite => "bipartite".into(),
            PatternClass::CorePeriphery { core } => format!("core-periphery(core={core})"),
            PatternClass::SourceBasin { source, basin } => {
                format!("source-basin({source}->{basin})")
            }
            PatternClass::BasinDelta { basin, delta } => format!("basin-delta({basin}->{delta})"),
            PatternClass::CommunityHierarchy { from, to } => {
                format!("community-hierarchy({from}->{to})")
            }
            PatternClass::Uniform { dense } => {
                format!("uniform({})", if *dense { "dense" } else { "sparse" })
            }
            PatternClass::Other { signature } => format!("other({signature})"),
        }
    }

    /// True when the label is a systematic fallback rather than one of the
    /// named structure classes.
    pub fn systematic(&self) -> bool {
        matches!(
            self,
            PatternClass::Uniform { .. } | PatternClass::Other { .. }
        )
    }
}

/// All K x K sign patterns in a deterministic order: bit `i` of the mask
/// selects +1 for the `i`-th cell, cells taken row-major over the upper
/// triangle (undirected) or the full matrix (directed).
pub fn enumerate_patterns(k: usize, directed: bool) -> Result<Vec<BlockMatrix>> {
    if k == 0 || k > MAX_ENUMERATION_K {
        return Err(MesoError::TooManyGroups {
            k,
            max: MAX_ENUMERATION_K,
        });
    }
    let cells: Vec<(usize, usize)> = if directed {
        (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).collect()
    } else {
        (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect()
    };
    let mut out = Vec::with_capacity(1usize << cells.len());
    for mask in 0u64..(1u64 << cells.len()) {
        let mut entries = vec![-1i8; k * k];
        for (bit, &(a, b)) in cells.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                entries[a * k + b] = 1;
                if !directed {
                    entries[b * k + a] = 1;
                }
            } else if !directed {
                entries[b * k + a] = -1;
            }
        }
        out.push(BlockMatrix::new(k, entries, directed)?);
    }
    Ok(out)
}

/// True when no row and no column of `b` is sign-uniform, the necessary
/// condition for the pattern to score under the configuration null (whose Q
/// matrix has vanishing row and column sums).
pub fn admissible_under_configuration(b: &BlockMatrix) -> bool {
    let k = b.k();
    let row_uniform =
        |a: usize| -> bool { (1..k).all(|c| b.get(a, c) == b.get(a, 0)) };
    let col_uniform =
        |c: usize| -> bool { (1..k).all(|a| b.get(a, c) == b.get(0, c)) };
    !(0..k).any(row_uniform) && !(0..k).any(col_uniform)
}

/// Maps a 2x2 pattern to its structure class.
pub fn classify_2x2(b: &BlockMatrix) -> Result<PatternClass> {
    if b.k() != 2 {
        return Err(MesoError::DimensionMismatch {
            expected: 2,
            found: b.k(),
        });
    }
    let cells = (b.get(0, 0), b.get(0, 1), b.get(1, 0), b.get(1, 1));
    let class = match cells {
        (1, -1, -1, 1) => PatternClass::Community,
        (-1, 1, 1, -1) => PatternClass::Bipartite,
        (1, 1, 1, -1) => PatternClass::CorePeriphery { core: 0 },
        (-1, 1, 1, 1) => PatternClass::CorePeriphery { core: 1 },
        (1, 1, 1, 1) => PatternClass::Uniform { dense: true },
        (-1, -1, -1, -1) => PatternClass::Uniform { dense: false },
        directed_cells if b.directed() => match directed_cells {
            (-1, 1, -1, 1) => PatternClass::SourceBasin {
                source: 0,
                basin: 1,
            },
            (1, -1, 1, -1) => PatternClass::SourceBasin {
                source: 1,
                basin: 0,
            },
            (1, 1, -1, -1) => PatternClass::BasinDelta { basin: 0, delta: 1 },
            (-1, -1, 1, 1) => PatternClass::BasinDelta { basin: 1, delta: 0 },
            (1, 1, -1, 1) => PatternClass::CommunityHierarchy { from: 0, to: 1 },
            (1, -1, 1, 1) => PatternClass::CommunityHierarchy { from: 1, to: 0 },
            _ => PatternClass::Other {
                signature: signature(b),
            },
        },
        _ => PatternClass::Other {
            signature: signature(b),
        },
    };
    Ok(class)
}

fn signature(b: &BlockMatrix) -> String {
    b.entries()
        .iter()
        .map(|&e| if e > 0 { '+' } else { '-' })
        .collect()
}

/// Canonical representative of `b` under simultaneous row+column
/// permutations: the lexicographically smallest flattened sign vector.
pub fn canonical_form(b: &BlockMatrix) -> BlockMatrix {
    let k = b.k();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best: Option<Vec<i8>> = None;
    permute_groups(&mut perm, 0, &mut |p| {
        let mut entries = vec![0i8; k * k];
        for a in 0..k {
            for c in 0..k {
                entries[p[a] * k + p[c]] = b.get(a, c);
            }
        }
        match &best {
            Some(current) if *current <= entries => {}
            _ => best = Some(entries),
        }
    });
    BlockMatrix::new(k, best.expect("at least one permutation"), b.directed())
        .expect("permutation preserves validity")
}

fn permute_groups(items: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute_groups(items, start + 1, visit);
        items.swap(start, i);
    }
}

/// CSV report over all K x K patterns: sign bits, admissibility and, for
/// K=2, the class label with its origin (named taxonomy vs systematic).
pub fn patterns_report(k: usize, directed: bool) -> Result<String> {
    let patterns = enumerate_patterns(k, directed)?;
    let mut out = String::from("pattern,admissible_configuration,label,label_origin\n");
    for b in &patterns {
        let admissible = admissible_under_configuration(b);
        let (label, origin) = if k == 2 {
            let class = classify_2x2(b)?;
            let origin = if class.systematic() {
                "systematic"
            } else {
                "named"
            };
            (class.label(), origin)
        } else {
            ("".into(), "")
        };
        out.push_str(&format!("{},{},{},{}\n", signature(b), admissible, label, origin));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_patterns(2, false).unwrap().len(), 8);
        assert_eq!(enumerate_patterns(2, true).unwrap().len(), 16);
        assert_eq!(enumerate_patterns(3, false).unwrap().len(), 64);
        assert_eq!(enumerate_patterns(3, true).unwrap().len(), 512);
        assert!(matches!(
            enumerate_patterns(5, false),
            Err(MesoError::TooManyGroups { .. })
        ));
    }

    #[test]
    fn enumeration_is_deterministic_and_unique() {
        let a = enumerate_patterns(3, true).unwrap();
        let b = enumerate_patterns(3, true).unwrap();
        assert_eq!(a, b);
        let mut entries: Vec<&[i8]> = a.iter().map(|m| m.entries()).collect();
        entries.sort();
        entries.dedup();
        assert_eq!(entries.len(), 512);
    }

    #[test]
    fn admissibility_examples() {
        let community = BlockMatrix::from_rows(&[vec![1, -1], vec![-1, 1]], false).unwrap();
        assert!(admissible_under_configuration(&community));
        let cp = BlockMatrix::from_rows(&[vec![1, 1], vec![1, -1]], false).unwrap();
        assert!(!admissible_under_configuration(&cp));
        let cp_plus_community = BlockMatrix::from_rows(
            &[vec![1, 1, -1], vec![1, -1, -1], vec![-1, -1, 1]],
            false,
        )
        .unwrap();
        assert!(admissible_under_configuration(&cp_plus_community));
    }

    #[test]
    fn exactly_two_admissible_2x2_patterns() {
        for directed in [false, true] {
            let admissible: Vec<PatternClass> = enumerate_patterns(2, directed)
                .unwrap()
                .iter()
                .filter(|b| admissible_under_configuration(b))
                .map(|b| classify_2x2(b).unwrap())
                .collect();
            assert_eq!(admissible.len(), 2);
            assert!(admissible.contains(&PatternClass::Community));
            assert!(admissible.contains(&PatternClass::Bipartite));
        }
    }

    #[test]
    fn classification_examples() {
        let community = BlockMatrix::from_rows(&[vec![1, -1], vec![-1, 1]], false).unwrap();
        assert_eq!(classify_2x2(&community).unwrap(), PatternClass::Community);
        let source_basin = BlockMatrix::from_rows(&[vec![-1, 1], vec![-1, 1]], true).unwrap();
        assert_eq!(
            classify_2x2(&source_basin).unwrap(),
            PatternClass::SourceBasin {
                source: 0,
                basin: 1
            }
        );
        let hierarchy = BlockMatrix::from_rows(&[vec![1, 1], vec![-1, 1]], true).unwrap();
        assert_eq!(
            classify_2x2(&hierarchy).unwrap(),
            PatternClass::CommunityHierarchy { from: 0, to: 1 }
        );
    }

    #[test]
    fn every_directed_pattern_gets_a_class() {
        let patterns = enumerate_patterns(2, true).unwrap();
        let mut named = 0;
        for b in &patterns {
            if !classify_2x2(b).unwrap().systematic() {
                named += 1;
            }
        }
        // community, bipartite, 2 CP, 2 source-basin, 2 basin-delta, 2 CH
        assert_eq!(named, 10);
    }

    #[test]
    fn admissibility_is_permutation_invariant() {
        for b in enumerate_patterns(3, true).unwrap() {
            let admissible = admissible_under_configuration(&b);
            let canonical = canonical_form(&b);
            assert_eq!(admissible, admissible_under_configuration(&canonical));
        }
    }

    #[test]
    fn canonical_form_identifies_relabelings() {
        let cp0 = BlockMatrix::from_rows(&[vec![1, 1], vec![1, -1]], false).unwrap();
        let cp1 = BlockMatrix::from_rows(&[vec![-1, 1], vec![1, 1]], false).unwrap();
        assert_eq!(canonical_form(&cp0), canonical_form(&cp1));
        let community = BlockMatrix::community(2, false);
        assert_ne!(canonical_form(&cp0), canonical_form(&community));
    }

    #[test]
    fn report_shape() {
        let csv = patterns_report(2, true).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 17);
        assert!(lines[0].starts_with("pattern,"));
        assert!(csv.contains("community-hierarchy"));
        assert!(csv.contains("systematic"));
    }
}
