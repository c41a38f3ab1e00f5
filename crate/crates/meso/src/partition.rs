//! Node partitions: label vectors with group counts and sizes, plus the
//! `node_id group_id` file format and partition comparison helpers.

use crate::error::{MesoError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<u32>,
    k: usize,
    sizes: Vec<usize>,
}

impl Partition {
    /// Wraps a label vector with an explicit group count `k`; every label
    /// must lie in `0..k`. Groups may be empty.
    pub fn new(labels: Vec<u32>, k: usize) -> Result<Partition> {
        if k == 0 {
            return Err(MesoError::InvalidInput("K must be at least 1".into()));
        }
        let mut sizes = vec![0usize; k];
        for (node, &label) in labels.iter().enumerate() {
            if label as usize >= k {
                return Err(MesoError::LabelOutOfRange {
                    node,
                    label: label as usize,
                    k,
                });
            }
            sizes[label as usize] += 1;
        }
        Ok(Partition { labels, k, sizes })
    }

    /// Infers `k` as `1 + max label`.
    pub fn from_labels(labels: Vec<u32>) -> Result<Partition> {
        let k = labels.iter().max().map(|&m| m as usize + 1).unwrap_or(1);
        Partition::new(labels, k)
    }

    /// The one-group partition.
    pub fn trivial(n: usize) -> Partition {
        Partition {
            labels: vec![0; n],
            k: 1,
            sizes: vec![n],
        }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label_of(&self, node: usize) -> usize {
        self.labels[node] as usize
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Serializes as `node_id group_id` lines sorted by node id, LF endings.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (node, label) in self.labels.iter().enumerate() {
            out.push_str(&format!("{node} {label}\n"));
        }
        out
    }

    /// Remaps group labels by `perm`: new label of a node in old group `g`
    /// is `perm[g]`. `perm` must be a permutation of `0..k`.
    pub fn relabeled(&self, perm: &[u32]) -> Result<Partition> {
        if perm.len() != self.k {
            return Err(MesoError::DimensionMismatch {
                expected: self.k,
                found: perm.len(),
            });
        }
        let labels = self.labels.iter().map(|&l| perm[l as usize]).collect();
        Partition::new(labels, self.k)
    }
}

/// Parses partition text: `node_id group_id` per line, `#` comments ignored.
/// The nodes must cover `0..N-1` exactly once.
pub fn parse_partition(text: &str) -> Result<Partition> {
    let mut seen: Vec<(u64, u32, usize)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(MesoError::Parse {
                line: lineno,
                message: format!("expected `node group`, found {} fields", fields.len()),
            });
        }
        let node: u64 = fields[0].parse().map_err(|_| MesoError::Parse {
            line: lineno,
            message: format!("invalid node id `{}`", fields[0]),
        })?;
        let group: u32 = fields[1].parse().map_err(|_| MesoError::Parse {
            line: lineno,
            message: format!("invalid group id `{}`", fields[1]),
        })?;
        seen.push((node, group, lineno));
    }
    if seen.is_empty() {
        return Err(MesoError::InvalidInput("empty partition file".into()));
    }
    seen.sort_unstable();
    let n = seen.last().unwrap().0 as usize + 1;
    if seen.len() != n {
        return Err(MesoError::InvalidInput(format!(
            "partition lists {} nodes but ids run up to {}",
            seen.len(),
            n - 1
        )));
    }
    let mut labels = vec![0u32; n];
    for (pos, &(node, group, lineno)) in seen.iter().enumerate() {
        if node as usize != pos {
            return Err(MesoError::Parse {
                line: lineno,
                message: format!("node {node} is missing or duplicated"),
            });
        }
        labels[pos] = group;
    }
    Partition::from_labels(labels)
}

/// Normalized mutual information between two partitions of the same node
/// set, normalized by the mean entropy. 1.0 for identical partitions (up to
/// relabeling), 0.0 for independent ones.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    if a.node_count() != b.node_count() {
        return Err(MesoError::SizeMismatch {
            labels: a.node_count(),
            nodes: b.node_count(),
        });
    }
    let n = a.node_count() as f64;
    if a.node_count() == 0 {
        return Err(MesoError::InvalidInput("empty partitions".into()));
    }
    let mut joint = vec![0usize; a.k() * b.k()];
    for i in 0..a.node_count() {
        joint[a.label_of(i) * b.k() + b.label_of(i)] += 1;
    }
    let entropy = |sizes: &[usize]| -> f64 {
        sizes
            .iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let p = s as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let ha = entropy(a.sizes());
    let hb = entropy(b.sizes());
    let mut info = 0.0;
    for ga in 0..a.k() {
        for gb in 0..b.k() {
            let nab = joint[ga * b.k() + gb];
            if nab == 0 {
                continue;
            }
            let pab = nab as f64 / n;
            let pa = a.sizes()[ga] as f64 / n;
            let pb = b.sizes()[gb] as f64 / n;
            info += pab * (pab / (pa * pb)).ln();
        }
    }
    if ha + hb == 0.0 {
        // Both partitions are single groups: identical by convention.
        return Ok(1.0);
    }
    Ok(2.0 * info / (ha + hb))
}

/// Relabels `p` by the group permutation that maximizes per-node agreement
/// with `reference`. Both partitions must have the same K (small, since all
/// K! permutations are tried). Ties resolve to the lexicographically
/// smallest permutation.
pub fn align_to(p: &Partition, reference: &Partition) -> Result<Partition> {
    if p.k() != reference.k() {
        return Err(MesoError::DimensionMismatch {
            expected: reference.k(),
            found: p.k(),
        });
    }
    if p.node_count() != reference.node_count() {
        return Err(MesoError::SizeMismatch {
            labels: p.node_count(),
            nodes: reference.node_count(),
        });
    }
    let k = p.k();
    // Agreement counts: overlap[g][h] = nodes with label g in p, h in reference.
    let mut overlap = vec![0usize; k * k];
    for i in 0..p.node_count() {
        overlap[p.label_of(i) * k + reference.label_of(i)] += 1;
    }
    let mut best_perm: Vec<u32> = (0..k as u32).collect();
    let mut best_score = 0usize;
    let mut first = true;
    let mut perm: Vec<u32> = (0..k as u32).collect();
    permute(&mut perm, 0, &mut |candidate| {
        let score: usize = (0..k)
            .map(|g| overlap[g * k + candidate[g] as usize])
            .sum();
        if first || score > best_score {
            best_score = score;
            best_perm = candidate.to_vec();
            first = false;
        }
    });
    p.relabeled(&best_perm)
}

fn permute(items: &mut [u32], start: usize, visit: &mut impl FnMut(&[u32])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_bounds() {
        let p = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(p.sizes(), &[2, 2]);
        let err = Partition::new(vec![0, 2], 2).unwrap_err();
        assert!(matches!(err, MesoError::LabelOutOfRange { .. }));
    }

    #[test]
    fn file_round_trip() {
        let p = Partition::new(vec![1, 0, 1], 2).unwrap();
        let text = p.to_file_string();
        assert_eq!(text, "0 1\n1 0\n2 1\n");
        assert_eq!(parse_partition(&text).unwrap(), p);
    }

    #[test]
    fn parse_rejects_gaps() {
        let err = parse_partition("0 0\n2 1\n").unwrap_err();
        assert!(matches!(err, MesoError::InvalidInput(_)));
    }

    #[test]
    fn parse_rejects_duplicates() {
        assert!(parse_partition("0 0\n1 1\n1 0\n").is_err());
    }

    #[test]
    fn nmi_identity_and_independence() {
        let a = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        let relabeled = Partition::new(vec![1, 1, 0, 0], 2).unwrap();
        assert!((nmi(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!((nmi(&a, &relabeled).unwrap() - 1.0).abs() < 1e-12);
        let cross = Partition::new(vec![0, 1, 0, 1], 2).unwrap();
        assert!(nmi(&a, &cross).unwrap().abs() < 1e-12);
        let trivial = Partition::trivial(4);
        assert!((nmi(&trivial, &trivial).unwrap() - 1.0).abs() < 1e-12);
        assert!(nmi(&a, &trivial).unwrap().abs() < 1e-12);
    }

    #[test]
    fn alignment_finds_best_relabeling() {
        let reference = Partition::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap();
        let shuffled = Partition::new(vec![2, 2, 0, 0, 1, 1], 3).unwrap();
        let aligned = align_to(&shuffled, &reference).unwrap();
        assert_eq!(aligned.labels(), reference.labels());
    }
}
