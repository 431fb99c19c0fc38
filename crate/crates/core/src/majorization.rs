//! Orders on weight vectors: majorization, T-transform chains, h-splits and
//! the dominance network between sample-mean sizes.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::combine::WeightVector;
use crate::error::{Error, Result};

const TOL: f64 = 1e-12;

/// Largest dimension accepted by [`is_h_split_majorized`].
pub const H_SPLIT_MAX_DIM: usize = 12;

/// Largest size accepted by [`dominance_network`].
pub const NETWORK_MAX_SIZE: u32 = 10_000;

fn padded(a: &[f64], len: usize) -> Vec<f64> {
    let mut v = a.to_vec();
    v.resize(len, 0.0);
    v
}

/// `θ ≺ η`: after zero-padding to a common length and sorting increasingly,
/// every partial sum of `θ` is at least the matching partial sum of `η`, with
/// equal totals.
pub fn is_majorized(theta: &[f64], eta: &[f64]) -> bool {
    let s = theta.len().max(eta.len());
    if s == 0 {
        return true;
    }
    let mut a = padded(theta, s);
    let mut b = padded(eta, s);
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (mut pa, mut pb) = (0.0, 0.0);
    for k in 0..s - 1 {
        pa += a[k];
        pb += b[k];
        if pa < pb - TOL {
            return false;
        }
    }
    let ta: f64 = a.iter().sum();
    let tb: f64 = b.iter().sum();
    (ta - tb).abs() <= TOL
}

/// How two weight vectors compare under majorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Equal up to permutation and zero padding.
    Equivalent,
    /// `θ ≺ η`.
    Majorized,
    /// `η ≺ θ`.
    Majorizes,
    Incomparable,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Equivalent => "θ ~ η",
            Relation::Majorized => "θ ≺ η",
            Relation::Majorizes => "θ ≻ η",
            Relation::Incomparable => "incomparable",
        })
    }
}

pub fn compare(theta: &[f64], eta: &[f64]) -> Relation {
    match (is_majorized(theta, eta), is_majorized(eta, theta)) {
        (true, true) => Relation::Equivalent,
        (true, false) => Relation::Majorized,
        (false, true) => Relation::Majorizes,
        (false, false) => Relation::Incomparable,
    }
}

/// Replaces coordinates `i`, `j` of `v` by `λv_i + (1−λ)v_j` and
/// `λv_j + (1−λ)v_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTransform {
    pub i: usize,
    pub j: usize,
    pub lambda: f64,
}

impl TTransform {
    pub fn new(i: usize, j: usize, lambda: f64) -> Result<Self> {
        if i == j {
            return Err(Error::ParameterDomain("T-transform needs distinct indices".into()));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::ParameterDomain(format!("lambda {lambda} outside [0, 1]")));
        }
        Ok(TTransform { i, j, lambda })
    }

    pub fn apply(&self, v: &mut [f64]) {
        let (a, b) = (v[self.i], v[self.j]);
        v[self.i] = self.lambda * a + (1.0 - self.lambda) * b;
        v[self.j] = self.lambda * b + (1.0 - self.lambda) * a;
    }
}

impl fmt::Display for TTransform {
    /// Indices are shown 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({},{}; λ={})", self.i + 1, self.j + 1, self.lambda)
    }
}

/// T-transforms turning `η` (zero-padded) into a permutation of `θ`, or
/// `None` when `θ ⊀ η`. At most `s − 1` steps; indices refer to `η`'s
/// coordinates.
pub fn t_transform_chain(theta: &[f64], eta: &[f64]) -> Option<Vec<TTransform>> {
    if !is_majorized(theta, eta) {
        return None;
    }
    let s = theta.len().max(eta.len());
    let mut x = padded(theta, s);
    x.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut y = padded(eta, s);
    // positions of η in decreasing order
    let mut pos: Vec<usize> = (0..s).collect();
    pos.sort_by(|&a, &b| y[b].total_cmp(&y[a]));
    let mut chain = Vec::new();
    for _ in 0..s {
        let Some(j) = (0..s).rev().find(|&r| y[pos[r]] > x[r] + TOL) else {
            break;
        };
        let k = (j + 1..s).find(|&r| y[pos[r]] < x[r] - TOL)?;
        let (yj, yk) = (y[pos[j]], y[pos[k]]);
        let delta = (yj - x[j]).min(x[k] - yk);
        let lambda = (1.0 - delta / (yj - yk)).clamp(0.0, 1.0);
        let t = TTransform {
            i: pos[j],
            j: pos[k],
            lambda,
        };
        t.apply(&mut y);
        debug_assert!((y[pos[j]] - (yj - delta)).abs() <= 1e-10);
        chain.push(t);
    }
    let mut got = y;
    got.sort_unstable_by(|a, b| b.total_cmp(a));
    if got.iter().zip(&x).all(|(a, b)| (a - b).abs() <= 1e-10) {
        Some(chain)
    } else {
        None
    }
}

struct SplitSearch {
    sums: Vec<f64>,
    reach: HashMap<(u32, u64), bool>,
    parts: HashMap<(u32, u32, u64), bool>,
}

impl SplitSearch {
    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= TOL
    }

    /// Whether the multiset `mask` arises from `v` by recursive equal splits.
    fn reachable(&mut self, mask: u32, v: f64) -> bool {
        if !Self::close(self.sums[mask as usize], v) {
            return false;
        }
        if mask.count_ones() == 1 {
            return true;
        }
        let key = (mask, v.to_bits());
        if let Some(&r) = self.reach.get(&key) {
            return r;
        }
        let m = mask.count_ones();
        let mut ok = false;
        for h in 2..=m {
            if self.partition(mask, h, v / h as f64) {
                ok = true;
                break;
            }
        }
        self.reach.insert(key, ok);
        ok
    }

    /// Whether `mask` splits into `h` groups each reachable from `v`.
    fn partition(&mut self, mask: u32, h: u32, v: f64) -> bool {
        if h == 1 {
            return self.reachable(mask, v);
        }
        if mask.count_ones() < h || !Self::close(self.sums[mask as usize], v * h as f64) {
            return false;
        }
        let key = (mask, h, v.to_bits());
        if let Some(&r) = self.parts.get(&key) {
            return r;
        }
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut ok = false;
        // submasks of `rest`, each joined with the lowest element
        let mut sub = rest;
        loop {
            let group = sub | low;
            if group != mask
                && Self::close(self.sums[group as usize], v)
                && self.reachable(group, v)
                && self.partition(mask ^ group, h - 1, v)
            {
                ok = true;
                break;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        self.parts.insert(key, ok);
        ok
    }

    /// Whether `mask` can be assigned to `eta`, one reachable group each.
    fn assign(&mut self, mask: u32, eta: &[f64]) -> bool {
        match eta.split_first() {
            None => mask == 0,
            Some((&v, rest_eta)) => {
                let mut sub = mask;
                loop {
                    if sub != 0 && self.reachable(sub, v) && self.assign(mask ^ sub, rest_eta) {
                        return true;
                    }
                    if sub == 0 {
                        return false;
                    }
                    sub = (sub - 1) & mask;
                }
            }
        }
    }
}

/// Whether `θ` is obtained from `η` by replacing each `ηⱼ` with a group of
/// coordinates generated by recursive equal splits of `ηⱼ`.
pub fn is_h_split_majorized(theta: &[f64], eta: &[f64]) -> Result<bool> {
    let dim = theta.len().max(eta.len());
    if dim > H_SPLIT_MAX_DIM {
        return Err(Error::CapacityLimit(format!(
            "h-split search supports dimension at most {H_SPLIT_MAX_DIM}, got {dim}"
        )));
    }
    if eta.len() > theta.len() {
        return Ok(false);
    }
    let n = theta.len();
    let mut sums = vec![0.0; 1 << n];
    for mask in 1..(1usize << n) {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + theta[low];
    }
    let mut search = SplitSearch {
        sums,
        reach: HashMap::new(),
        parts: HashMap::new(),
    };
    let full = ((1u64 << n) - 1) as u32;
    Ok(search.assign(full, eta))
}

/// `(θᵢπⱼ)` with `i` varying slowest.
pub fn kronecker(theta: &WeightVector, pi: &WeightVector) -> WeightVector {
    let v = theta
        .as_slice()
        .iter()
        .flat_map(|t| pi.as_slice().iter().map(move |p| t * p))
        .collect();
    WeightVector::new(v).expect("products of positive weights are positive")
}

/// `X̄_from ≥st X̄_to` between sample means of the given sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DominanceEdge {
    pub from_size: u32,
    pub to_size: u32,
}

impl DominanceEdge {
    pub fn new(from_size: u32, to_size: u32) -> Result<Self> {
        if to_size == 0 || from_size <= to_size {
            return Err(Error::ParameterDomain(format!(
                "edge {from_size}:{to_size} needs from > to >= 1"
            )));
        }
        Ok(DominanceEdge { from_size, to_size })
    }
}

impl fmt::Display for DominanceEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.from_size, self.to_size)
    }
}

/// Parses `from:to`.
impl FromStr for DominanceEdge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            what: "dominance edge",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (a, b) = s.split_once(':').ok_or_else(|| err("expected from:to"))?;
        let a = a.trim().parse().map_err(|_| err("bad from size"))?;
        let b = b.trim().parse().map_err(|_| err("bad to size"))?;
        DominanceEdge::new(a, b)
    }
}

/// Closure of `base` under scaling both sizes by any `k` with `k·from ≤ max`,
/// and under transitivity.
pub fn dominance_network(base: &[DominanceEdge], max: u32) -> Result<BTreeSet<DominanceEdge>> {
    if max > NETWORK_MAX_SIZE {
        return Err(Error::CapacityLimit(format!(
            "network size {max} above {NETWORK_MAX_SIZE}"
        )));
    }
    let mut edges: BTreeSet<DominanceEdge> = base.iter().copied().collect();
    loop {
        let mut added = Vec::new();
        for e in &edges {
            let mut k = 2;
            while k * e.from_size <= max {
                let m = DominanceEdge {
                    from_size: k * e.from_size,
                    to_size: k * e.to_size,
                };
                if !edges.contains(&m) {
                    added.push(m);
                }
                k += 1;
            }
            let lo = DominanceEdge {
                from_size: e.to_size,
                to_size: 0,
            };
            let hi = DominanceEdge {
                from_size: e.to_size,
                to_size: u32::MAX,
            };
            for f in edges.range(lo..=hi) {
                let t = DominanceEdge {
                    from_size: e.from_size,
                    to_size: f.to_size,
                };
                if !edges.contains(&t) {
                    added.push(t);
                }
            }
        }
        if added.is_empty() {
            return Ok(edges);
        }
        edges.extend(added);
    }
}
