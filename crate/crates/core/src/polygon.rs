//! Lower convex polygons with exact rational vertices.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::nt::{q_max, qi, Q};

/// Slope -> total horizontal length.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SlopeMultiset(pub BTreeMap<Q, Q>);

impl SlopeMultiset {
    pub fn new() -> SlopeMultiset {
        SlopeMultiset::default()
    }

    pub fn insert(&mut self, slope: Q, length: Q) {
        if length.is_zero() {
            return;
        }
        *self.0.entry(slope).or_insert_with(Q::zero) += length;
    }

    pub fn width(&self) -> Q {
        self.0.values().sum()
    }

    pub fn length_of(&self, slope: &Q) -> Q {
        self.0.get(slope).cloned().unwrap_or_else(Q::zero)
    }

    /// The multiset under `s -> 1 - s`.
    pub fn reflected(&self) -> SlopeMultiset {
        SlopeMultiset(self.0.iter().map(|(s, l)| (Q::one() - s, l.clone())).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.0.iter()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polygon {
    vertices: Vec<(Q, Q)>,
}

impl fmt::Debug for Polygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Polygon[")?;
        for (i, (x, y)) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({x}, {y})")?;
        }
        f.write_str("]")
    }
}

fn slope(a: &(Q, Q), b: &(Q, Q)) -> Q {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

impl Polygon {
    /// Validates x strictly increasing and slopes strictly increasing.
    pub fn from_vertices(vertices: Vec<(Q, Q)>) -> Result<Polygon> {
        if vertices.is_empty() {
            return Err(Error::EmptyInput);
        }
        for w in vertices.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParameter("abscissae must increase".into()));
            }
        }
        for w in vertices.windows(3) {
            if slope(&w[0], &w[1]) >= slope(&w[1], &w[2]) {
                return Err(Error::InvalidParameter("polygon is not strictly convex".into()));
            }
        }
        Ok(Polygon { vertices })
    }

    /// Assembles slopes in increasing order starting from the origin.
    pub fn from_slopes(slopes: &SlopeMultiset) -> Polygon {
        let mut vertices = alloc::vec![(Q::zero(), Q::zero())];
        for (s, len) in slopes.iter() {
            let (x, y) = vertices.last().unwrap().clone();
            vertices.push((x + len, y + s * len));
        }
        Polygon { vertices }
    }

    pub fn vertices(&self) -> &[(Q, Q)] {
        &self.vertices
    }

    pub fn start(&self) -> &(Q, Q) {
        &self.vertices[0]
    }

    pub fn end(&self) -> &(Q, Q) {
        self.vertices.last().unwrap()
    }

    pub fn width(&self) -> Q {
        &self.end().0 - &self.start().0
    }

    pub fn is_vertex(&self, x: &Q) -> bool {
        self.vertices.iter().any(|(vx, _)| vx == x)
    }

    /// Height at `x`, or `None` outside the polygon's range.
    pub fn eval(&self, x: &Q) -> Option<Q> {
        let v = &self.vertices;
        if x < &v[0].0 || x > &v[v.len() - 1].0 {
            return None;
        }
        for w in v.windows(2) {
            if x <= &w[1].0 {
                return Some(&w[0].1 + slope(&w[0], &w[1]) * (x - &w[0].0));
            }
        }
        Some(v[0].1.clone())
    }

    pub fn slopes(&self) -> SlopeMultiset {
        let mut m = SlopeMultiset::new();
        for w in self.vertices.windows(2) {
            m.insert(slope(&w[0], &w[1]), &w[1].0 - &w[0].0);
        }
        m
    }

    /// Both axes multiplied by `factor`.
    pub fn scaled(&self, factor: &Q) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|(x, y)| (x * factor, y * factor)).collect(),
        }
    }

    /// Union of the vertex abscissae of two polygons, sorted.
    fn breakpoints(&self, other: &Polygon) -> Vec<Q> {
        let mut xs: Vec<Q> = self
            .vertices
            .iter()
            .chain(&other.vertices)
            .map(|(x, _)| x.clone())
            .collect();
        xs.sort();
        xs.dedup();
        xs
    }
}

/// Greatest convex minorant of the finite points; `None` heights are `+∞`.
pub fn lower_hull(points: &[(Q, Option<Q>)]) -> Result<Polygon> {
    let mut pts: Vec<(Q, Q)> = points
        .iter()
        .filter_map(|(x, y)| y.as_ref().map(|y| (x.clone(), y.clone())))
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptyInput);
    }
    pts.sort();
    for w in pts.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::InvalidParameter("repeated abscissa".into()));
        }
    }
    let mut hull: Vec<(Q, Q)> = Vec::new();
    for pt in pts {
        while hull.len() >= 2 {
            let n = hull.len();
            // drop the middle point unless the turn is strictly convex
            if slope(&hull[n - 2], &hull[n - 1]) >= slope(&hull[n - 1], &pt) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    Ok(Polygon { vertices: hull })
}

/// Hull of the points `(i, heights[i])`.
pub fn lower_hull_heights(heights: &[Option<Q>]) -> Result<Polygon> {
    let pts: Vec<(Q, Option<Q>)> = heights
        .iter()
        .enumerate()
        .map(|(i, h)| (qi(i as i64), h.clone()))
        .collect();
    lower_hull(&pts)
}

/// The Hodge polygon: slopes `0` and `1` with multiplicity `ℓ - 1` each and
/// `i/d_j` for `1 <= i < d_j`, each of length 1.
pub fn hodge_slopes(ell: usize, orders: &[usize]) -> Result<SlopeMultiset> {
    if ell == 0 || orders.len() != ell || orders.iter().any(|&d| d == 0) {
        return Err(Error::InvalidParameter("need ℓ >= 1 positive pole orders".into()));
    }
    let d = orders.iter().sum::<usize>() + ell - 2;
    if d == 0 {
        return Err(Error::InvalidParameter("degree d must be positive".into()));
    }
    let mut m = SlopeMultiset::new();
    m.insert(Q::zero(), qi(ell as i64 - 1));
    m.insert(Q::one(), qi(ell as i64 - 1));
    for &dj in orders {
        for i in 1..dj {
            m.insert(crate::nt::q(i as i64, dj as i64), Q::one());
        }
    }
    Ok(m)
}

pub fn hodge_polygon(ell: usize, orders: &[usize]) -> Result<Polygon> {
    Ok(Polygon::from_slopes(&hodge_slopes(ell, orders)?))
}

/// `P >= Q` everywhere; both are piecewise linear, so the vertex abscissae
/// of both polygons suffice.
pub fn lies_above(p: &Polygon, q: &Polygon) -> Result<bool> {
    if p.start().0 != q.start().0 || p.end().0 != q.end().0 {
        return Err(Error::WidthMismatch);
    }
    Ok(p.breakpoints(q)
        .iter()
        .all(|x| p.eval(x).unwrap() >= q.eval(x).unwrap()))
}

/// Largest vertical gap `P(x) - Q(x)`; requires `P` above `Q`.
pub fn max_gap(p: &Polygon, q: &Polygon) -> Result<Q> {
    if !lies_above(p, q)? {
        return Err(Error::InvalidParameter("first polygon is not above the second".into()));
    }
    Ok(p.breakpoints(q)
        .iter()
        .map(|x| p.eval(x).unwrap() - q.eval(x).unwrap())
        .fold(Q::zero(), |a, b| q_max(&a, &b)))
}

pub fn slope_run_length(p: &Polygon, s: &Q) -> Q {
    p.slopes().length_of(s)
}
