//! Per-mode stream-function problem: parameters, operator assembly, solves and derived fields.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{check_len, param, Error, Result};
use crate::grid::ChebyshevGrid;
use crate::linalg::{singular_values, solve_refined, ComplexMatrix, Lu, RealMatrix};

/// Residual acceptance threshold for a collocation solve.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// `(n, L, Φ)` for one Fourier mode `e^{i n x / L}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    n: i64,
    l: f64,
    phi: f64,
}

impl ModeParams {
    pub fn new(n: i64, l: f64, phi: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(param("L", alloc::format!("must be positive and finite, got {l}")));
        }
        if !(phi >= 0.0) || !phi.is_finite() {
            return Err(param("phi", alloc::format!("must be nonnegative and finite, got {phi}")));
        }
        Ok(Self { n, l, phi })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn n_hat(&self) -> f64 {
        self.n as f64 / self.l
    }

    /// `|3Φn̂/2|^{1/3}`.
    pub fn beta(&self) -> f64 {
        (1.5 * self.phi * self.n_hat()).abs().cbrt()
    }

    /// Same `L` and `Φ`, different mode index.
    pub fn with_n(&self, n: i64) -> Self {
        Self { n, ..*self }
    }

    pub fn with_phi(&self, phi: f64) -> Result<Self> {
        Self::new(self.n, self.l, phi)
    }

    pub fn regime(&self, cfg: &RegimeConfig) -> Regime {
        let n = self.n.unsigned_abs() as f64;
        if self.n == 0 {
            Regime::Zero
        } else if self.phi < cfg.phi0 {
            Regime::SmallFlux
        } else if n <= cfg.eps1 * self.l * self.phi.sqrt() {
            Regime::Medium
        } else {
            Regime::High
        }
    }

    /// Smallest grid order satisfying `M ≥ max(64, ⌈6β⌉)`.
    pub fn resolved_order(&self) -> usize {
        let b = (6.0 * self.beta()).ceil();
        let b = if b.is_finite() { b as usize } else { usize::MAX };
        b.max(64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeConfig {
    pub eps1: f64,
    pub phi0: f64,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        Self {
            eps1: 0.05,
            phi0: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    Zero,
    SmallFlux,
    Medium,
    High,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Zero => "zero",
            Regime::SmallFlux => "small_flux",
            Regime::Medium => "medium",
            Regime::High => "high",
        }
    }
}

/// `U = (3/4)Φ(1 - y²)` and its derivatives at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PoiseuilleProfile {
    pub phi: f64,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub ddu: Vec<f64>,
}

impl PoiseuilleProfile {
    pub fn new(phi: f64, grid: &ChebyshevGrid) -> Self {
        let pts = grid.points();
        Self {
            phi,
            u: pts.iter().map(|y| 0.75 * phi * (1.0 - y * y)).collect(),
            du: pts.iter().map(|y| -1.5 * phi * y).collect(),
            ddu: pts.iter().map(|_| -1.5 * phi).collect(),
        }
    }

    pub fn at(phi: f64, y: f64) -> f64 {
        0.75 * phi * (1.0 - y * y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BcKind {
    /// ψ = ψ' = 0 at ±1.
    Clamped,
    /// ψ = ψ'' = 0 at ±1.
    Slip,
}

impl BcKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BcKind::Clamped => "clamped",
            BcKind::Slip => "slip",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub params: ModeParams,
    pub bc: BcKind,
    pub psi: Vec<C64>,
    /// `ψ', ψ'', ψ''', ψ⁗` at the nodes.
    pub derivs: [Vec<C64>; 4],
    pub v1: Vec<C64>,
    pub v2: Vec<C64>,
    pub omega: Vec<C64>,
    /// ‖Ax − b‖₂/‖b‖₂ of the accepted linear solve (0 for closed forms).
    pub relative_residual: f64,
}

impl ModeSolution {
    /// Derives velocity and vorticity from `ψ`, differentiating with the grid matrices.
    pub fn from_psi(params: ModeParams, bc: BcKind, psi: Vec<C64>, grid: &ChebyshevGrid) -> Result<Self> {
        check_len(grid.len(), psi.len())?;
        let derivs = [1, 2, 3, 4].map(|k| grid.d(k).apply(&psi));
        Ok(Self::from_derivatives(params, bc, psi, derivs))
    }

    pub fn from_derivatives(params: ModeParams, bc: BcKind, psi: Vec<C64>, derivs: [Vec<C64>; 4]) -> Self {
        let nh = params.n_hat();
        let v1 = derivs[0].iter().map(|d| -d).collect();
        let v2 = psi.iter().map(|p| C64::new(0.0, nh) * p).collect();
        let omega = derivs[1].iter().zip(&psi).map(|(d, p)| d - p * (nh * nh)).collect();
        Self {
            params,
            bc,
            psi,
            derivs,
            v1,
            v2,
            omega,
            relative_residual: 0.0,
        }
    }

    pub fn zero(params: ModeParams, grid: &ChebyshevGrid) -> Self {
        let z = alloc::vec![C64::zero(); grid.len()];
        Self::from_derivatives(params, BcKind::Clamped, z.clone(), [z.clone(), z.clone(), z.clone(), z])
    }

    pub fn scale(&self) -> f64 {
        self.psi.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Boundary data `(ψ(1), ψ(-1), ψ'(1), ψ'(-1), ψ''(1), ψ''(-1))`.
    pub fn boundary_values(&self, grid: &ChebyshevGrid) -> [C64; 6] {
        let m = grid.order();
        let d1 = grid.d1();
        let d2 = grid.d2();
        let dot = |row: &[f64]| {
            row.iter()
                .zip(&self.psi)
                .fold(C64::zero(), |acc, (&a, &p)| acc + p * a)
        };
        [
            self.psi[0],
            self.psi[m],
            dot(d1.row(0)),
            dot(d1.row(m)),
            dot(d2.row(0)),
            dot(d2.row(m)),
        ]
    }
}

/// `f_n = i n̂ F₂ − F₁'`.
pub fn rhs_from_force(f1: &[C64], f2: &[C64], params: &ModeParams, grid: &ChebyshevGrid) -> Result<Vec<C64>> {
    check_len(grid.len(), f1.len())?;
    check_len(grid.len(), f2.len())?;
    let nh = params.n_hat();
    let df1 = grid.d1().apply(f1);
    Ok(f2
        .iter()
        .zip(&df1)
        .map(|(g, d)| C64::new(0.0, nh) * g - d)
        .collect())
}

/// The collocated operator `−i n̂ U'' + i n̂ U (D² − n̂²) − (D² − n̂²)²` on every node, without boundary rows.
pub fn interior_operator(params: &ModeParams, grid: &ChebyshevGrid) -> ComplexMatrix {
    let nh = params.n_hat();
    let nh2 = nh * nh;
    let prof = PoiseuilleProfile::new(params.phi(), grid);
    let d2 = grid.d2();
    let d4 = grid.d4();
    let i = C64::new(0.0, 1.0);
    ComplexMatrix::from_fn(grid.len(), grid.len(), |r, c| {
        let delta = if r == c { 1.0 } else { 0.0 };
        let lap = d2[(r, c)] - nh2 * delta;
        let bilap = d4[(r, c)] - 2.0 * nh2 * d2[(r, c)] + nh2 * nh2 * delta;
        i * (nh * (prof.u[r] * lap - prof.ddu[r] * delta)) - bilap
    })
}

/// Interior operator with rows `0, 1, M−1, M` replaced by the boundary conditions.
pub fn bordered_operator(params: &ModeParams, grid: &ChebyshevGrid, bc: BcKind) -> ComplexMatrix {
    let mut a = interior_operator(params, grid);
    border(&mut a, grid, bc);
    a
}

/// The clamped boundary-bordered operator.
pub fn operator_matrix(params: &ModeParams, grid: &ChebyshevGrid) -> Result<ComplexMatrix> {
    if params.n() == 0 {
        return Err(Error::Contract("mode 0 has no fourth-order operator; use solve_zero_mode".to_string()));
    }
    Ok(bordered_operator(params, grid, BcKind::Clamped))
}

fn border(a: &mut ComplexMatrix, grid: &ChebyshevGrid, bc: BcKind) {
    let m = grid.order();
    let deriv = match bc {
        BcKind::Clamped => grid.d1(),
        BcKind::Slip => grid.d2(),
    };
    for (row, node) in [(0, 0), (m, m)] {
        for x in a.row_mut(row) {
            *x = C64::zero();
        }
        a[(row, node)] = C64::new(1.0, 0.0);
    }
    for (row, node) in [(1, 0), (m - 1, m)] {
        let src = deriv.row(node);
        for (x, &d) in a.row_mut(row).iter_mut().zip(src) {
            *x = C64::new(d, 0.0);
        }
    }
}

/// Right-hand side with the boundary rows zeroed.
pub fn bordered_rhs(f: &[C64], grid: &ChebyshevGrid) -> Vec<C64> {
    let m = grid.order();
    let mut b = f.to_vec();
    for k in [0, 1, m - 1, m] {
        b[k] = C64::zero();
    }
    b
}

/// Integrated form of the boundary-value problem: unknowns are `ψ⁗` at the
/// nodes and the cubic `Σ c_k (y + 1)^k`, with `ψ = J₄ψ⁗ + cubic`. The
/// equation is collocated at all `M + 1` nodes and the four boundary
/// conditions close the system. Its entries stay `O(Φ n̂)` where the
/// bordered `D⁴` matrix grows like `M⁸`.
pub fn integrated_system(params: &ModeParams, grid: &ChebyshevGrid, bc: BcKind) -> ComplexMatrix {
    let n = grid.len();
    let m = grid.order();
    let nh = params.n_hat();
    let nh2 = nh * nh;
    let prof = PoiseuilleProfile::new(params.phi(), grid);
    let (j2, j3, j4) = (grid.j(2), grid.j(3), grid.j(4));
    let pts = grid.points();
    let i = C64::new(0.0, 1.0);
    let mut a = ComplexMatrix::zeros(n + 4, n + 4);
    for r in 0..n {
        let s = pts[r] + 1.0;
        let cubic = [1.0, s, s * s, s * s * s];
        let cubic2 = [0.0, 0.0, 2.0, 6.0 * s];
        let (u, ddu) = (prof.u[r], prof.ddu[r]);
        let row = a.row_mut(r);
        let op = |psi: f64, psi2: f64, g: f64| {
            i * (nh * (u * (psi2 - nh2 * psi) - ddu * psi)) - (g - 2.0 * nh2 * psi2 + nh2 * nh2 * psi)
        };
        for c in 0..n {
            row[c] = op(j4[(r, c)], j2[(r, c)], if r == c { 1.0 } else { 0.0 });
        }
        for k in 0..4 {
            row[n + k] = op(cubic[k], cubic2[k], 0.0);
        }
    }
    let (deriv, dcubic): (&RealMatrix, fn(f64) -> [f64; 4]) = match bc {
        BcKind::Clamped => (j3, |s| [0.0, 1.0, 2.0 * s, 3.0 * s * s]),
        BcKind::Slip => (j2, |s| [0.0, 0.0, 2.0, 6.0 * s]),
    };
    for (row, node) in [(n, 0), (n + 1, m)] {
        let s = pts[node] + 1.0;
        let cubic = [1.0, s, s * s, s * s * s];
        for c in 0..n {
            a[(row, c)] = C64::new(j4[(node, c)], 0.0);
        }
        for k in 0..4 {
            a[(row, n + k)] = C64::new(cubic[k], 0.0);
        }
    }
    for (row, node) in [(n + 2, 0), (n + 3, m)] {
        let dc = dcubic(pts[node] + 1.0);
        for c in 0..n {
            a[(row, c)] = C64::new(deriv[(node, c)], 0.0);
        }
        for k in 0..4 {
            a[(row, n + k)] = C64::new(dc[k], 0.0);
        }
    }
    a
}

/// A factored integrated system, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    params: ModeParams,
    bc: BcKind,
    system: ComplexMatrix,
    lu: Lu,
}

impl ModeOperator {
    pub fn new(params: ModeParams, grid: &ChebyshevGrid, bc: BcKind) -> Result<Self> {
        if params.n() == 0 {
            return Err(Error::Contract("mode 0 has no fourth-order operator; use solve_zero_mode".to_string()));
        }
        let system = integrated_system(&params, grid, bc);
        let lu = Lu::factor(&system)?;
        Ok(Self { params, bc, system, lu })
    }

    pub fn params(&self) -> &ModeParams {
        &self.params
    }

    pub fn bc(&self) -> BcKind {
        self.bc
    }

    pub fn system(&self) -> &ComplexMatrix {
        &self.system
    }

    /// Solves with right-hand side `f` sampled on every node.
    pub fn solve(&self, f: &[C64], grid: &ChebyshevGrid) -> Result<ModeSolution> {
        check_len(grid.len(), f.len())?;
        let n = grid.len();
        let mut b = f.to_vec();
        b.extend([C64::zero(); 4]);
        let sol = solve_refined(&self.system, &self.lu, &b);
        if !(sol.relative_residual <= RESIDUAL_TOL) {
            return Err(Error::Solver {
                reason: "collocation residual above acceptance threshold".to_string(),
                residual: sol.relative_residual,
            });
        }
        let (g, c) = sol.x.split_at(n);
        let [psi, d1, d2, d3, d4] = reconstruct(g, c, self.bc, grid);
        let mut out = ModeSolution::from_derivatives(self.params, self.bc, psi, [d1, d2, d3, d4]);
        out.relative_residual = sol.relative_residual;
        Ok(out)
    }
}

/// Nodal values of `ψ = J₄g + cubic` and its first four derivatives. The upper
/// half is evaluated from the Taylor data at `+1` plus the antiderivatives
/// anchored there, so that neither wall inherits the cancellation of
/// integrating across the channel.
fn reconstruct(g: &[C64], c: &[C64], bc: BcKind, grid: &ChebyshevGrid) -> [Vec<C64>; 5] {
    let m = grid.order();
    let dot = |row: &[f64], v: &[C64]| row.iter().zip(v).fold(C64::zero(), |acc, (&w, &x)| acc + x * w);
    let rev: Vec<C64> = g.iter().rev().copied().collect();
    // Taylor coefficients at -1 and +1
    let mut lo = [c[0], c[1], c[2], c[3]];
    let s = 2.0;
    let mut hi = [
        C64::zero(),
        C64::zero(),
        (dot(grid.j(2).row(0), g) + c[2] * 2.0 + c[3] * (6.0 * s)) / 2.0,
        (dot(grid.j(1).row(0), g) + c[3] * 6.0) / 6.0,
    ];
    let d1 = dot(grid.j(3).row(0), g) + c[1] + c[2] * (2.0 * s) + c[3] * (3.0 * s * s);
    lo[0] = C64::zero();
    match bc {
        BcKind::Clamped => lo[1] = C64::zero(),
        BcKind::Slip => {
            lo[2] = C64::zero();
            hi[1] = d1;
            hi[2] = C64::zero();
        }
    }
    // d-th derivative of Σ a_j t^j
    let taylor = |a: &[C64; 4], t: f64, d: usize| {
        let mut acc = C64::zero();
        for j in (d..4).rev() {
            let fall: f64 = ((j - d + 1)..=j).map(|x| x as f64).product();
            acc = acc * t + a[j] * fall;
        }
        acc
    };
    let pts = grid.points();
    let mut out: [Vec<C64>; 5] = Default::default();
    for (d, col) in out.iter_mut().enumerate() {
        let k = 4 - d;
        *col = pts
            .iter()
            .enumerate()
            .map(|(r, &y)| {
                if k == 0 {
                    g[r]
                } else if y <= 0.0 {
                    taylor(&lo, y + 1.0, d) + dot(grid.j(k).row(r), g)
                } else {
                    // (-1)^k J_k on the mirrored grid
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    taylor(&hi, y - 1.0, d) + dot(grid.j(k).row(m - r), &rev) * sign
                }
            })
            .collect();
    }
    out
}

pub fn solve_mode(params: &ModeParams, f: &[C64], grid: &ChebyshevGrid, bc: BcKind) -> Result<ModeSolution> {
    ModeOperator::new(*params, grid, bc)?.solve(f, grid)
}

pub fn solve_mode_clamped(params: &ModeParams, f: &[C64], grid: &ChebyshevGrid) -> Result<ModeSolution> {
    solve_mode(params, f, grid, BcKind::Clamped)
}

pub fn solve_mode_slip(params: &ModeParams, f: &[C64], grid: &ChebyshevGrid) -> Result<ModeSolution> {
    solve_mode(params, f, grid, BcKind::Slip)
}

/// Closed-form solution of `ψ⁗ = F₁₀'` with clamped ends.
pub fn solve_zero_mode(f10: &[C64], params: &ModeParams, grid: &ChebyshevGrid) -> Result<ModeSolution> {
    check_len(grid.len(), f10.len())?;
    let params = params.with_n(0);
    let i1 = grid.cumulative_integral(f10)?;
    let i2 = grid.cumulative_integral(&i1)?;
    let i3 = grid.cumulative_integral(&i2)?;
    // node 0 is y = 1
    let (two, three) = (i2[0], i3[0]);
    let a1 = three * 1.5 - two * 1.5;
    let a2 = two - three * 1.5;
    let pts = grid.points();
    let col = |f: &dyn Fn(usize, f64) -> C64| -> Vec<C64> { pts.iter().enumerate().map(|(k, &y)| f(k, y + 1.0)).collect() };
    let psi = col(&|k, s| i3[k] + a1 * (s * s * s / 6.0) + a2 * (s * s / 2.0));
    let d1 = col(&|k, s| i2[k] + a1 * (s * s / 2.0) + a2 * s);
    let d2 = col(&|k, s| i1[k] + a1 * s + a2);
    let d3 = col(&|k, _| f10[k] + a1);
    let d4 = grid.d1().apply(f10);
    Ok(ModeSolution::from_derivatives(params, BcKind::Clamped, psi, [d1, d2, d3, d4]))
}

/// σ_min by dense SVD.
pub fn smallest_singular_value(a: &ComplexMatrix) -> Result<f64> {
    if a.rows() != a.cols() {
        return Err(Error::Contract("singular value of a non-square matrix".to_string()));
    }
    singular_values(a)?
        .last()
        .copied()
        .ok_or_else(|| Error::Contract("empty matrix".to_string()))
}
