use std::collections::VecDeque;
use std::fmt;
use std::ops::{BitAnd, BitOr};

use super::relation::{BasicRelation, RelationSet};
use super::SiaError;
use crate::time::Time;

/// A subset of `{<, =, >}` relating two time points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointRelation(u8);

impl PointRelation {
    pub const EMPTY: PointRelation = PointRelation(0);
    pub const LT: PointRelation = PointRelation(1);
    pub const EQ: PointRelation = PointRelation(2);
    pub const GT: PointRelation = PointRelation(4);
    pub const LE: PointRelation = PointRelation(3);
    pub const GE: PointRelation = PointRelation(6);
    pub const NE: PointRelation = PointRelation(5);
    pub const ALL: PointRelation = PointRelation(7);

    pub fn from_bits(bits: u8) -> Self {
        PointRelation(bits & 7)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Everything except `≠` is convex.
    pub fn is_convex(self) -> bool {
        self != Self::NE
    }

    pub fn hull(self) -> Self {
        if self == Self::NE {
            Self::ALL
        } else {
            self
        }
    }

    pub fn is_subset(self, other: PointRelation) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn converse(self) -> Self {
        let lt = self.0 & 1;
        let gt = (self.0 >> 2) & 1;
        PointRelation((self.0 & 2) | (lt << 2) | gt)
    }

    pub fn compose(self, other: PointRelation) -> Self {
        PointRelation(POINT_COMPOSE[self.0 as usize][other.0 as usize])
    }

    /// Order forced between two known values.
    pub fn between(a: Time, b: Time) -> Self {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Self::LT,
            std::cmp::Ordering::Equal => Self::EQ,
            std::cmp::Ordering::Greater => Self::GT,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self.0 {
            0 => "∅",
            1 => "<",
            2 => "=",
            3 => "<=",
            4 => ">",
            5 => "!=",
            6 => ">=",
            _ => "?",
        }
    }
}

const fn compose_basic(a: u8, b: u8) -> u8 {
    match (a, b) {
        (2, x) | (x, 2) => x,
        (1, 1) => 1,
        (4, 4) => 4,
        _ => 7,
    }
}

const POINT_COMPOSE: [[u8; 8]; 8] = {
    let mut table = [[0u8; 8]; 8];
    let mut a = 0usize;
    while a < 8 {
        let mut b = 0usize;
        while b < 8 {
            let mut out = 0u8;
            let mut i = 0;
            while i < 3 {
                let x = 1u8 << i;
                if a as u8 & x != 0 {
                    let mut j = 0;
                    while j < 3 {
                        let y = 1u8 << j;
                        if b as u8 & y != 0 {
                            out |= compose_basic(x, y);
                        }
                        j += 1;
                    }
                }
                i += 1;
            }
            table[a][b] = out;
            b += 1;
        }
        a += 1;
    }
    table
};

impl BitOr for PointRelation {
    type Output = PointRelation;
    fn bitor(self, rhs: Self) -> Self {
        PointRelation(self.0 | rhs.0)
    }
}

impl BitAnd for PointRelation {
    type Output = PointRelation;
    fn bitand(self, rhs: Self) -> Self {
        PointRelation(self.0 & rhs.0)
    }
}

impl fmt::Display for PointRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Four point relations for an ordered interval pair `(X, Y)`:
/// `[X⁻?Y⁻, X⁻?Y⁺, X⁺?Y⁻, X⁺?Y⁺]`. The internal orders `X⁻ < X⁺` and
/// `Y⁻ < Y⁺` are implicit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EndpointEncoding([PointRelation; 4]);

impl EndpointEncoding {
    pub fn new(entries: [PointRelation; 4]) -> Self {
        EndpointEncoding(entries)
    }

    pub fn entries(&self) -> [PointRelation; 4] {
        self.0
    }

    pub fn start_start(&self) -> PointRelation {
        self.0[0]
    }

    pub fn start_end(&self) -> PointRelation {
        self.0[1]
    }

    pub fn end_start(&self) -> PointRelation {
        self.0[2]
    }

    pub fn end_end(&self) -> PointRelation {
        self.0[3]
    }

    /// The encoding of `(Y, X)`.
    pub fn converse(&self) -> Self {
        let [ss, se, es, ee] = self.0;
        EndpointEncoding([ss.converse(), es.converse(), se.converse(), ee.converse()])
    }

    /// Basic relations whose endpoint order fits every entry.
    pub fn decode(&self) -> RelationSet {
        self.decode_with(false, false)
    }

    /// Like [`decode`](Self::decode) but lets either side be a time point
    /// (start equal to end); basics whose endpoint order cannot hold for a
    /// point are dropped.
    pub fn decode_with(&self, x_is_point: bool, y_is_point: bool) -> RelationSet {
        let mut out = RelationSet::EMPTY;
        for b in BasicRelation::ALL {
            let t = b.endpoints();
            if x_is_point && (t[0] != t[2] || t[1] != t[3]) {
                continue;
            }
            if y_is_point && (t[0] != t[1] || t[2] != t[3]) {
                continue;
            }
            if t.iter().zip(self.0.iter()).all(|(need, have)| need.is_subset(*have)) {
                out = out | RelationSet::single(b);
            }
        }
        out
    }
}

/// What a point of a [`PointNetwork`] stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    /// A fixed value on the time line; shared by every grounded endpoint with that value.
    Value(Time),
    /// Start or end of a variable interval node.
    Start(usize),
    End(usize),
}

/// Endpoint-level constraint network over convex point relations.
#[derive(Clone, Debug)]
pub struct PointNetwork {
    kinds: Vec<PointKind>,
    rel: Vec<PointRelation>,
    /// `(start, end)` point indices for every interval node of the source network.
    endpoints: Vec<(usize, usize)>,
    propagated: bool,
}

impl PointNetwork {
    pub(crate) fn with_points(kinds: Vec<PointKind>, endpoints: Vec<(usize, usize)>) -> Self {
        let n = kinds.len();
        let mut rel = vec![PointRelation::ALL; n * n];
        for i in 0..n {
            rel[i * n + i] = PointRelation::EQ;
        }
        let mut net = PointNetwork { kinds, rel, endpoints, propagated: false };
        // Known values are totally ordered; free points lie strictly inside the real line.
        for i in 0..n {
            for j in (i + 1)..n {
                match (net.kinds[i], net.kinds[j]) {
                    (PointKind::Value(a), PointKind::Value(b)) => {
                        net.set(i, j, PointRelation::between(a, b));
                    }
                    (PointKind::Value(v), _) | (_, PointKind::Value(v)) if !v.is_finite() => {
                        let (value_idx, free_idx) =
                            if matches!(net.kinds[i], PointKind::Value(_)) { (i, j) } else { (j, i) };
                        let r = if v == Time::NegInf { PointRelation::GT } else { PointRelation::LT };
                        net.set(free_idx, value_idx, r);
                    }
                    _ => {}
                }
            }
        }
        net
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kind(&self, p: usize) -> PointKind {
        self.kinds[p]
    }

    pub fn endpoints(&self, node: usize) -> (usize, usize) {
        self.endpoints[node]
    }

    pub fn is_propagated(&self) -> bool {
        self.propagated
    }

    pub fn get(&self, i: usize, j: usize) -> PointRelation {
        self.rel[i * self.kinds.len() + j]
    }

    fn set(&mut self, i: usize, j: usize, r: PointRelation) {
        let n = self.kinds.len();
        self.rel[i * n + j] = r;
        self.rel[j * n + i] = r.converse();
    }

    /// Intersects the label of `(i, j)` with `r`.
    pub fn restrict(&mut self, i: usize, j: usize, r: PointRelation) {
        let cur = self.get(i, j);
        self.set(i, j, cur & r);
        self.propagated = false;
    }

    /// Path consistency: `r(i,k) ← r(i,k) ∩ r(i,j)∘r(j,k)` to a fixpoint.
    /// On convex point relations the fixpoint is the minimal network.
    pub fn propagate(mut self) -> Result<PointNetwork, SiaError> {
        let n = self.kinds.len();
        if self.rel.iter().any(|r| r.is_empty()) {
            return Err(SiaError::Inconsistent);
        }
        let mut queued = vec![false; n * n];
        let mut queue = VecDeque::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.get(i, j) != PointRelation::ALL {
                    queue.push_back((i, j));
                    queued[i * n + j] = true;
                }
            }
        }
        while let Some((i, j)) = queue.pop_front() {
            queued[i * n + j] = false;
            let rij = self.get(i, j);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                // (i, k) through j
                let rik = self.get(i, k);
                let new_ik = rik & rij.compose(self.get(j, k));
                if new_ik != rik {
                    if new_ik.is_empty() {
                        return Err(SiaError::Inconsistent);
                    }
                    self.set(i, k, new_ik);
                    let (a, b) = if i < k { (i, k) } else { (k, i) };
                    if !queued[a * n + b] {
                        queued[a * n + b] = true;
                        queue.push_back((a, b));
                    }
                }
                // (k, j) through i
                let rkj = self.get(k, j);
                let new_kj = rkj & self.get(k, i).compose(rij);
                if new_kj != rkj {
                    if new_kj.is_empty() {
                        return Err(SiaError::Inconsistent);
                    }
                    self.set(k, j, new_kj);
                    let (a, b) = if k < j { (k, j) } else { (j, k) };
                    if !queued[a * n + b] {
                        queued[a * n + b] = true;
                        queue.push_back((a, b));
                    }
                }
            }
        }
        self.propagated = true;
        Ok(self)
    }

    /// Greatest known value `v` with `p ≥ v` forced, or `-inf`.
    pub fn lower_bound(&self, p: usize) -> Time {
        if let PointKind::Value(v) = self.kinds[p] {
            return v;
        }
        self.kinds
            .iter()
            .enumerate()
            .filter_map(|(q, k)| match k {
                PointKind::Value(v) if self.get(p, q).is_subset(PointRelation::GE) => Some(*v),
                _ => None,
            })
            .max()
            .unwrap_or(Time::NegInf)
    }

    /// Least known value `v` with `p ≤ v` forced, or `+inf`.
    pub fn upper_bound(&self, p: usize) -> Time {
        if let PointKind::Value(v) = self.kinds[p] {
            return v;
        }
        self.kinds
            .iter()
            .enumerate()
            .filter_map(|(q, k)| match k {
                PointKind::Value(v) if self.get(p, q).is_subset(PointRelation::LE) => Some(*v),
                _ => None,
            })
            .min()
            .unwrap_or(Time::PosInf)
    }
}
