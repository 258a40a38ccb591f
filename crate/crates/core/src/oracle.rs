//! Dense-matrix reference for the linear (χ = 0) walk.
//!
//! Builds the coin `C ⊗ I` and the conditional shift `S` as explicit
//! `2N × 2N` matrices and multiplies them. This is `O(N²)` per step and exists
//! only to cross-check the stepping kernel.
//!
//! The shift closes the chain into a ring so that the matrix is exactly
//! unitary. For fields whose amplitude stays away from the edges, which is
//! the only regime the kernel accepts, the ring and the open chain agree.

use num_complex::Complex64;

use crate::field::SpinorField;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, rhs.dim);
        let mut out = DenseMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                let lhs = self[(i, k)];
                if lhs == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..self.dim {
                    out[(i, j)] += lhs * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(m, x)| m * x)
                    .sum()
            })
            .collect()
    }

    /// Largest entry-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

const R: usize = 0;
const L: usize = 1;

/// Basis index of `|s⟩ ⊗ |n⟩` in the flattened state.
fn basis(site: usize, spin: usize) -> usize {
    2 * site + spin
}

/// `C ⊗ I` with `C = [[cos θ, sin θ], [sin θ, −cos θ]]` on every site.
pub fn coin_matrix(sites: usize, theta: f64) -> DenseMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    let coin = [[c, s], [s, -c]];
    let mut m = DenseMatrix::zeros(2 * sites);
    for n in 0..sites {
        for out in [R, L] {
            for inp in [R, L] {
                m[(basis(n, out), basis(n, inp))] = Complex64::new(coin[out][inp], 0.0);
            }
        }
    }
    m
}

/// Conditional shift on a ring: `|R⟩` moves from `n + 1` to `n`, `|L⟩` from `n − 1` to `n`.
pub fn shift_matrix(sites: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(2 * sites);
    for n in 0..sites {
        let from_right = (n + 1) % sites;
        let from_left = (n + sites - 1) % sites;
        m[(basis(n, R), basis(from_right, R))] = Complex64::new(1.0, 0.0);
        m[(basis(n, L), basis(from_left, L))] = Complex64::new(1.0, 0.0);
    }
    m
}

/// One linear step as the full matrix `S (C ⊗ I)`.
pub fn linear_step_matrix(sites: usize, theta: f64) -> DenseMatrix {
    shift_matrix(sites).matmul(&coin_matrix(sites, theta))
}

/// Flattens a field to `[a₀, b₀, a₁, b₁, …]`.
pub fn flatten(field: &SpinorField) -> Vec<Complex64> {
    field.a().iter().zip(field.b()).flat_map(|(a, b)| [*a, *b]).collect()
}

/// Applies one linear step by dense matrix–vector multiplication.
pub fn linear_oracle_step(field: &SpinorField, theta: f64) -> SpinorField {
    let matrix = linear_step_matrix(field.len(), theta);
    apply_matrix(&matrix, field)
}

/// Applies a prebuilt step matrix, for repeated oracle steps.
pub fn apply_matrix(matrix: &DenseMatrix, field: &SpinorField) -> SpinorField {
    let out = matrix.apply(&flatten(field));
    let a = out.iter().step_by(2).copied().collect();
    let b = out.iter().skip(1).step_by(2).copied().collect();
    SpinorField::from_components(a, b, field.origin()).expect("oracle preserves the field shape")
}
