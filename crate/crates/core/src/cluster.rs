//! Agglomerative clustering of features with Ward linkage.
//!
//! Items are the columns of a sample-by-feature matrix. Singleton clusters
//! have ids `0..n`; the cluster created by merge `k` gets id `n + k`.

use std::io::Write;

use ndarray::{ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper-triangle pairwise distances in row-major `(i < j)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensedDistances {
    n: usize,
    d: Vec<f64>,
}

impl CondensedDistances {
    pub fn new(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Shape {
                expected: n * n.saturating_sub(1) / 2,
                actual: d.len(),
            });
        }
        if d.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::invalid("distances must be non-negative numbers"));
        }
        Ok(Self { n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        // row i starts after i rows of decreasing length
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.d[self.offset(i, j)],
            std::cmp::Ordering::Greater => self.d[self.offset(j, i)],
        }
    }
}

/// Euclidean distances between the columns of `x`.
pub fn pairwise_euclidean(x: ArrayView2<'_, f64>) -> Result<CondensedDistances> {
    let n = x.ncols();
    if n < 2 {
        return Err(Error::invalid("need at least two columns to cluster"));
    }
    if x.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("NaN in clustering input"));
    }
    let cols: Vec<Vec<f64>> = x.axis_iter(Axis(1)).map(|c| c.to_vec()).collect();
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let ss: f64 = cols[i]
                .iter()
                .zip(&cols[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d.push(ss.sqrt());
        }
    }
    CondensedDistances::new(n, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkageTable {
    n: usize,
    merges: Vec<Merge>,
}

impl LinkageTable {
    pub fn n_items(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "left\tright\theight\tsize")?;
        for m in &self.merges {
            writeln!(w, "{}\t{}\t{}\t{}", m.left, m.right, m.height, m.size)?;
        }
        Ok(())
    }
}

/// Ward agglomeration via the Lance–Williams update
///
/// `d(u, v) = sqrt(((|v|+|s|)/T)·d(v,s)² + ((|v|+|t|)/T)·d(v,t)² − (|v|/T)·d(s,t)²)`
///
/// where `u = s ∪ t` and `T = |v| + |s| + |t|`. At each step the closest pair
/// is merged; ties go to the lexicographically smallest `(id, id)` pair.
pub fn ward_linkage(dist: &CondensedDistances) -> Result<LinkageTable> {
    let n = dist.n();
    if n < 2 {
        return Err(Error::invalid("Ward linkage needs at least two items"));
    }
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = dist.get(i, j);
        }
    }
    let mut id: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];

    let key = |d: &[f64], id: &[usize], a: usize, b: usize| {
        let (x, y) = (id[a].min(id[b]), id[a].max(id[b]));
        (d[a * n + b], x, y)
    };
    let less = |p: (f64, usize, usize), q: (f64, usize, usize)| {
        p.0 < q.0 || (p.0 == q.0 && (p.1, p.2) < (q.1, q.2))
    };
    let nearest = |d: &[f64], id: &[usize], active: &[bool], a: usize| {
        let mut best: Option<usize> = None;
        for b in 0..n {
            if b == a || !active[b] {
                continue;
            }
            if best.is_none_or(|c| less(key(d, id, a, b), key(d, id, a, c))) {
                best = Some(b);
            }
        }
        best
    };

    let mut nn: Vec<Option<usize>> = (0..n).map(|a| nearest(&d, &id, &active, a)).collect();
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut pick: Option<(usize, usize)> = None;
        for a in (0..n).filter(|&a| active[a]) {
            let b = nn[a].expect("at least two active clusters");
            if pick.is_none_or(|(pa, pb)| less(key(&d, &id, a, b), key(&d, &id, pa, pb))) {
                pick = Some((a, b));
            }
        }
        let (a, b) = pick.expect("at least two active clusters");
        let (s, t) = if id[a] < id[b] { (a, b) } else { (b, a) };
        let h = d[s * n + t];
        let (ns, nt) = (size[s] as f64, size[t] as f64);
        merges.push(Merge {
            left: id[s],
            right: id[t],
            height: h,
            size: size[s] + size[t],
        });

        // merged cluster lives in slot s
        active[t] = false;
        for v in (0..n).filter(|&v| active[v] && v != s) {
            let nv = size[v] as f64;
            let total = nv + ns + nt;
            let dvs = d[v * n + s];
            let dvt = d[v * n + t];
            let sq = ((nv + ns) * dvs * dvs + (nv + nt) * dvt * dvt - nv * h * h) / total;
            let dnew = sq.max(0.0).sqrt();
            d[v * n + s] = dnew;
            d[s * n + v] = dnew;
        }
        id[s] = n + step;
        size[s] += size[t];

        for v in 0..n {
            if !active[v] {
                nn[v] = None;
                continue;
            }
            let stale = v == s || nn[v].is_some_and(|c| c == s || c == t);
            if stale {
                nn[v] = nearest(&d, &id, &active, v);
            } else if let Some(c) = nn[v] {
                if less(key(&d, &id, v, s), key(&d, &id, v, c)) {
                    nn[v] = Some(s);
                }
            }
        }
    }
    Ok(LinkageTable { n, merges })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "criterion", content = "value", rename_all = "lowercase")]
pub enum CutCriterion {
    /// At most this many clusters.
    MaxClust(usize),
    /// Keep only merges at or below this height.
    Distance(f64),
}

/// Flat cluster labels (1-based, numbered by first item appearance).
pub fn cut_tree(l: &LinkageTable, criterion: CutCriterion) -> Result<Vec<usize>> {
    let n = l.n;
    let n_merges = match criterion {
        CutCriterion::MaxClust(m) => {
            if m == 0 || m > n {
                return Err(Error::invalid(format!("maxclust {m} must lie in [1, {n}]")));
            }
            n - m
        }
        CutCriterion::Distance(t) => {
            if !(t >= 0.0) {
                return Err(Error::invalid(format!(
                    "distance threshold {t} must be >= 0"
                )));
            }
            l.merges.iter().take_while(|m| m.height <= t).count()
        }
    };
    // union-find over items; cluster id -> representative item
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut rep: Vec<usize> = (0..n).collect();
    for m in &l.merges[..n_merges] {
        let (ra, rb) = (
            find(&mut parent, rep[m.left]),
            find(&mut parent, rep[m.right]),
        );
        parent[rb] = ra;
        rep.push(ra);
    }
    let mut label_of_root = vec![0usize; n];
    let mut next = 0;
    Ok((0..n)
        .map(|i| {
            let r = find(&mut parent, i);
            if label_of_root[r] == 0 {
                next += 1;
                label_of_root[r] = next;
            }
            label_of_root[r]
        })
        .collect())
}

fn abs_sums(x: ArrayView2<'_, f64>) -> Vec<f64> {
    x.axis_iter(Axis(1))
        .map(|c| c.iter().map(|v| v.abs()).sum())
        .collect()
}

/// `I(C) = Σ_{f ∈ C} Σ_i |x_if|`, indexed by `label - 1`.
pub fn cluster_importance(x: ArrayView2<'_, f64>, labels: &[usize]) -> Result<Vec<f64>> {
    if labels.len() != x.ncols() {
        return Err(Error::Shape {
            expected: x.ncols(),
            actual: labels.len(),
        });
    }
    let k = labels.iter().copied().max().unwrap_or(0);
    let mut out = vec![0.0; k];
    for (s, &l) in abs_sums(x).into_iter().zip(labels) {
        if l == 0 {
            return Err(Error::invalid("cluster labels are 1-based"));
        }
        out[l - 1] += s;
    }
    Ok(out)
}

/// Up to `k` members per cluster ranked by their own absolute-value sum
/// (ties by column order), concatenated over clusters in label order.
pub fn top_k_per_cluster(
    x: ArrayView2<'_, f64>,
    feature_ids: &[String],
    labels: &[usize],
    k: usize,
) -> Result<Vec<String>> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if labels.len() != x.ncols() || feature_ids.len() != x.ncols() {
        return Err(Error::Shape {
            expected: x.ncols(),
            actual: labels.len().min(feature_ids.len()),
        });
    }
    let sums = abs_sums(x);
    let n_clusters = labels.iter().copied().max().unwrap_or(0);
    let mut out = Vec::new();
    for c in 1..=n_clusters {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&j| labels[j] == c).collect();
        members.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]).then(a.cmp(&b)));
        out.extend(members.into_iter().take(k).map(|j| feature_ids[j].clone()));
    }
    Ok(out)
}
