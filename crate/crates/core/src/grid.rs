//! Periodic staggered grids and the block unknown `(u, v, p)`.
//!
//! Cell `(i, j)` covers `[i h, (i+1) h] x [j h, (j+1) h]` of the unit square.
//! Each component stores one value per cell in row-major order
//! (`index = j * n + i`, `i` along x):
//!
//! * `u(i, j)` sits on the left vertical edge, at `(i h, (j + 1/2) h)`;
//! * `v(i, j)` sits on the bottom horizontal edge, at `((i + 1/2) h, j h)`;
//! * `p(i, j)` sits at the cell center, at `((i + 1/2) h, (j + 1/2) h)`.
//!
//! All indexing wraps periodically; there are no ghost layers.

use std::ops::{Index, IndexMut};

use rand::Rng;

use crate::error::{Error, Result};

/// Uniform periodic mesh on the unit square with `n` cells per side.
///
/// `n` is a power of two, so `h = 1/n` is exact in binary floating point
/// and `h * n == 1.0` holds bitwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Number of entries per component.
    #[inline]
    pub fn cells(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// Next grid in the standard-coarsening chain (`H = 2h`).
    pub fn coarser(&self) -> Result<Self> {
        if self.n < 8 {
            return Err(Error::CannotCoarsen(self.n));
        }
        Ok(Self { n: self.n / 2 })
    }

    pub fn finer(&self) -> Self {
        Self { n: self.n * 2 }
    }
}

/// One of the three staggered unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    U,
    V,
    P,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::U, Component::V, Component::P];

    /// Position of sample `(0, 0)` in units of `h`.
    pub fn offset(self) -> (f64, f64) {
        match self {
            Component::U => (0.0, 0.5),
            Component::V => (0.5, 0.0),
            Component::P => (0.5, 0.5),
        }
    }

    pub fn position(self) -> usize {
        match self {
            Component::U => 0,
            Component::V => 1,
            Component::P => 2,
        }
    }
}

/// The block unknown `x = (u, v, p)` on a periodic MAC grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredField {
    n: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub p: Vec<f64>,
}

impl StaggeredField {
    pub fn zeros(grid: GridSpec) -> Self {
        let len = grid.cells();
        Self {
            n: grid.n(),
            u: vec![0.0; len],
            v: vec![0.0; len],
            p: vec![0.0; len],
        }
    }

    pub fn constant(grid: GridSpec, cu: f64, cv: f64, cp: f64) -> Self {
        let len = grid.cells();
        Self {
            n: grid.n(),
            u: vec![cu; len],
            v: vec![cv; len],
            p: vec![cp; len],
        }
    }

    /// Builds a field from component arrays, checking their lengths.
    pub fn from_parts(grid: GridSpec, u: Vec<f64>, v: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        for c in [&u, &v, &p] {
            if c.len() != grid.cells() {
                return Err(Error::SizeMismatch {
                    expected: grid.n(),
                    found: (c.len() as f64).sqrt() as usize,
                });
            }
        }
        Ok(Self { n: grid.n(), u, v, p })
    }

    /// Entries drawn uniformly from `[-0.5, 0.5]`.
    pub fn random<R: Rng + ?Sized>(grid: GridSpec, rng: &mut R) -> Self {
        let mut f = Self::zeros(grid);
        for c in Component::ALL {
            for x in f.component_mut(c).iter_mut() {
                *x = rng.random::<f64>() - 0.5;
            }
        }
        f
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec { n: self.n }
    }

    /// Fails unless the field lives on `grid`.
    pub fn check(&self, grid: GridSpec) -> Result<()> {
        if self.n != grid.n() {
            return Err(Error::SizeMismatch {
                expected: grid.n(),
                found: self.n,
            });
        }
        Ok(())
    }

    pub fn component(&self, c: Component) -> &[f64] {
        match c {
            Component::U => &self.u,
            Component::V => &self.v,
            Component::P => &self.p,
        }
    }

    pub fn component_mut(&mut self, c: Component) -> &mut [f64] {
        match c {
            Component::U => &mut self.u,
            Component::V => &mut self.v,
            Component::P => &mut self.p,
        }
    }

    fn zip_mut(&mut self, other: &Self, f: impl Fn(&mut f64, f64)) {
        assert_eq!(self.n, other.n, "field size mismatch");
        for c in Component::ALL {
            for (a, &b) in self.component_mut(c).iter_mut().zip(other.component(c)) {
                f(a, b);
            }
        }
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Self) {
        self.zip_mut(other, |x, y| *x += a * y);
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.zip_mut(other, |x, y| *x += y);
    }

    pub fn sub_assign(&mut self, other: &Self) {
        self.zip_mut(other, |x, y| *x -= y);
    }

    pub fn scale(&mut self, a: f64) {
        for c in Component::ALL {
            self.component_mut(c).iter_mut().for_each(|x| *x *= a);
        }
    }

    /// Euclidean inner product over all `3 n^2` entries.
    ///
    /// Summation order is fixed (u, then v, then p; row-major inside each),
    /// so results are bitwise reproducible.
    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "field size mismatch");
        Component::ALL
            .iter()
            .map(|&c| dot(self.component(c), other.component(c)))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        Component::ALL
            .iter()
            .flat_map(|&c| self.component(c).iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn means(&self) -> [f64; 3] {
        Component::ALL.map(|c| mean(self.component(c)))
    }

    /// Removes the constant mode from each component.
    pub fn remove_mean(&mut self) {
        for c in Component::ALL {
            subtract_mean(self.component_mut(c));
        }
    }
}

impl Index<(Component, usize)> for StaggeredField {
    type Output = f64;
    fn index(&self, (c, k): (Component, usize)) -> &f64 {
        &self.component(c)[k]
    }
}

impl IndexMut<(Component, usize)> for StaggeredField {
    fn index_mut(&mut self, (c, k): (Component, usize)) -> &mut f64 {
        &mut self.component_mut(c)[k]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn mean(a: &[f64]) -> f64 {
    a.iter().sum::<f64>() / a.len() as f64
}

pub(crate) fn subtract_mean(a: &mut [f64]) {
    let m = mean(a);
    a.iter_mut().for_each(|x| *x -= m);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(4).is_ok());
        assert!(GridSpec::new(256).is_ok());
        assert_eq!(GridSpec::new(2), Err(Error::InvalidGrid(2)));
        assert_eq!(GridSpec::new(12), Err(Error::InvalidGrid(12)));
        assert_eq!(GridSpec::new(0), Err(Error::InvalidGrid(0)));
    }

    #[test]
    fn mesh_width_is_exact() {
        for k in 2..12 {
            let g = GridSpec::new(1 << k).unwrap();
            assert_eq!(g.h() * g.n() as f64, 1.0);
        }
    }

    #[test]
    fn coarsening_chain_ends_at_four() {
        let mut g = GridSpec::new(64).unwrap();
        let mut sizes = vec![g.n()];
        while let Ok(c) = g.coarser() {
            g = c;
            sizes.push(g.n());
        }
        assert_eq!(sizes, vec![64, 32, 16, 8, 4]);
        assert_eq!(g.coarser(), Err(Error::CannotCoarsen(4)));
    }

    #[test]
    fn linear_space_ops() {
        let g = GridSpec::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = StaggeredField::random(g, &mut rng);
        let b = StaggeredField::random(g, &mut rng);
        let mut c = a.clone();
        c.axpy(2.0, &b);
        for comp in Component::ALL {
            for k in 0..g.cells() {
                assert_eq!(c[(comp, k)], a[(comp, k)] + 2.0 * b[(comp, k)]);
            }
        }
        let brute: f64 = Component::ALL
            .iter()
            .flat_map(|&comp| a.component(comp).iter().map(|x| x * x))
            .sum();
        assert!((a.norm() - brute.sqrt()).abs() < 1e-14);
        assert!(a.max_abs() <= 0.5);
    }

    #[test]
    fn mean_removal() {
        let g = GridSpec::new(4).unwrap();
        let mut f = StaggeredField::constant(g, 1.0, -2.0, 3.5);
        f.u[3] += 16.0;
        f.remove_mean();
        for m in f.means() {
            assert!(m.abs() < 1e-15);
        }
        assert!((f.u[3] - 15.0).abs() < 1e-14);
    }

    #[test]
    fn size_checks() {
        let g4 = GridSpec::new(4).unwrap();
        let g8 = GridSpec::new(8).unwrap();
        let f = StaggeredField::zeros(g4);
        assert!(f.check(g4).is_ok());
        assert_eq!(
            f.check(g8),
            Err(Error::SizeMismatch {
                expected: 8,
                found: 4
            })
        );
        assert!(StaggeredField::from_parts(g4, vec![0.0; 16], vec![0.0; 16], vec![0.0; 15]).is_err());
    }
}
