//! Abstract engine for meromorphic-connection lattice pairs (G, G_0):
//! saturation to a logarithmic lattice at tau = 0, the Malgrange-Kashiwara
//! V-filtration, the spectrum and spectral polynomial, the monodromy
//! characteristic polynomial, and duality / tensor operations on spectra.

pub mod laurent;

use crate::brieskorn::LatticePair;
use crate::error::{Error, Result};
use crate::exactalg::matrix::{char_poly, row_space_basis, QMatrix};
use crate::exactalg::rational::{floor_i64, frac_part, parse_rational, render_rational, Rational};
use crate::exactalg::theta::ThetaMatrix;
use crate::exactalg::unipoly::{cyclotomic, rational_root_factor, UniPoly};
use laurent::{tau_del_tau, LaurentVec, TauLattice};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Multiset of rational spectral numbers beta with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpectrumMultiset {
    counts: BTreeMap<Rational, u64>,
}

impl SpectrumMultiset {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: &[(Rational, u64)]) -> Self {
        let mut s = Self::empty();
        for (beta, mult) in pairs {
            s.insert(beta.clone(), *mult);
        }
        s
    }

    pub fn insert(&mut self, beta: Rational, mult: u64) {
        if mult == 0 {
            return;
        }
        *self.counts.entry(beta).or_insert(0) += mult;
    }

    pub fn multiplicity(&self, beta: &Rational) -> u64 {
        self.counts.get(beta).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().map(|&m| m as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn to_pairs(&self) -> Vec<(Rational, u64)> {
        self.counts
            .iter()
            .map(|(b, &m)| (b.clone(), m))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, &u64)> {
        self.counts.iter()
    }

    /// Sorted expansion with repetitions.
    pub fn expanded(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        for (b, &m) in &self.counts {
            for _ in 0..m {
                out.push(b.clone());
            }
        }
        out
    }

    /// beta -> beta + shift.
    pub fn shifted(&self, shift: &Rational) -> SpectrumMultiset {
        SpectrumMultiset {
            counts: self
                .counts
                .iter()
                .map(|(b, &m)| (b + shift, m))
                .collect(),
        }
    }

    /// nu_beta = nu_{w - beta} for all beta.
    pub fn is_symmetric(&self, w: &Rational) -> bool {
        self.counts
            .iter()
            .all(|(b, &m)| self.multiplicity(&(w - b)) == m)
    }

    /// All beta strictly inside (lo, hi).
    pub fn is_strictly_inside(&self, lo: &Rational, hi: &Rational) -> bool {
        self.counts.keys().all(|b| b > lo && b < hi)
    }
}

/// Duality transform: nu_beta (G*, G_0*) = nu_{-beta} (G, G_0).
pub fn dual_spectrum(s: &SpectrumMultiset) -> SpectrumMultiset {
    SpectrumMultiset {
        counts: s.counts.iter().map(|(b, &m)| (-b, m)).collect(),
    }
}

/// Thom-Sebastiani convolution: nu_beta = sum_{b' + b'' = beta} nu'_{b'} nu''_{b''}.
pub fn convolve_spectra(a: &SpectrumMultiset, b: &SpectrumMultiset) -> SpectrumMultiset {
    let mut out = SpectrumMultiset::empty();
    for (x, &mx) in &a.counts {
        for (y, &my) in &b.counts {
            out.insert(x + y, mx * my);
        }
    }
    out
}

/// nu_beta = nu_{w - beta} for all beta.
pub fn check_symmetry(s: &SpectrumMultiset, w: i64) -> bool {
    s.is_symmetric(&Rational::from_integer(w.into()))
}

/// The spectral polynomial SP(S) = prod (S + beta)^{nu_beta}: factored display
/// string and exact expansion.
pub fn spectral_polynomial(s: &SpectrumMultiset) -> (String, UniPoly) {
    if s.is_empty() {
        return ("1".to_string(), UniPoly::one());
    }
    let mut expanded = UniPoly::one();
    let mut factors = Vec::new();
    for (beta, &mult) in &s.counts {
        let factor = UniPoly::x_plus(beta.clone());
        expanded = expanded.mul(&factor.pow(mult as usize));
        let base = if beta.is_zero() {
            "S".to_string()
        } else if beta.is_negative() {
            format!("(S-{})", render_rational(&-beta))
        } else {
            format!("(S+{})", render_rational(beta))
        };
        factors.push(if mult > 1 {
            format!("{base}^{mult}")
        } else {
            base
        });
    }
    (factors.join("*"), expanded)
}

/// Characteristic polynomial of the monodromy: prod (T - e^{2 pi i beta})^{nu_beta},
/// expanded exactly in Z[x]/Phi_L(x) with L the lcm of the denominators.
/// Errors when the result has non-integer coefficients (possible for spectra
/// that do not come from a monodromy).
pub fn monodromy_char_poly(s: &SpectrumMultiset) -> Result<UniPoly> {
    if s.is_empty() {
        return Ok(UniPoly::one());
    }
    let mut l = BigInt::one();
    for beta in s.counts.keys() {
        l = num::integer::lcm(l, beta.denom().clone());
    }
    let l: usize = usize::try_from(&l).map_err(|_| Error::MonodromyInconsistent)?;
    let phi = cyclotomic(l);
    let reduce = |p: &UniPoly| -> UniPoly { p.div_rem(&phi).1 };

    // Coefficients in T are elements of Z[x]/Phi_L.
    let mut coeffs: Vec<UniPoly> = vec![UniPoly::one()];
    for (beta, &mult) in &s.counts {
        // zeta = x^m with m = L*beta mod L.
        let scaled = beta * Rational::from_integer(BigInt::from(l));
        debug_assert!(scaled.denom().is_one());
        let m_big = scaled.numer().mod_floor_big(&BigInt::from(l));
        let m = usize::try_from(&m_big).expect("reduced exponent fits");
        let zeta = reduce(&UniPoly::monomial(Rational::one(), m));
        for _ in 0..mult {
            let mut next = vec![UniPoly::zero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] = next[k + 1].add(c);
                next[k] = next[k].sub(&reduce(&c.mul(&zeta)));
            }
            coeffs = next;
        }
    }
    let mut out = Vec::with_capacity(coeffs.len());
    for c in &coeffs {
        if c.deg() > 0 {
            return Err(Error::MonodromyInconsistent);
        }
        let v = c.coeff(0);
        if !v.denom().is_one() {
            return Err(Error::MonodromyInconsistent);
        }
        out.push(v);
    }
    Ok(UniPoly::new(out))
}

trait ModFloor {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
}
impl ModFloor for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        let r = self % m;
        if r.is_negative() {
            r + m
        } else {
            r
        }
    }
}

/// Saturate the Q[tau]-span of the G_0 basis under tau d_tau; returns the
/// stable logarithmic lattice and its residue matrix.
pub fn saturate_log_lattice(lp: &LatticePair) -> Result<(TauLattice, QMatrix)> {
    let mu = lp.mu;
    if mu == 0 {
        return Ok((TauLattice::standard(0), QMatrix::zero(0, 0)));
    }
    let mut lat = TauLattice::standard(mu);
    let cap = 4 * (mu + lp.t_matrix.deg().max(0) as usize + 2);
    for _ in 0..=cap {
        if let Some(res) = lat.residue(&lp.t_matrix) {
            return Ok((lat, res));
        }
        let basis = lat.basis();
        let mut gens = basis.clone();
        for w in &basis {
            gens.push(tau_del_tau(w, &lp.t_matrix));
        }
        lat = TauLattice::from_generators(mu, &gens)?;
    }
    Err(Error::IrregularAtZero { cap })
}

/// Generalized eigenspace decomposition of an exactly split matrix.
struct EigenSplit {
    /// (eigenvalue, basis vectors).
    spaces: Vec<(Rational, Vec<Vec<Rational>>)>,
}

fn eigen_split(res: &QMatrix) -> Result<EigenSplit> {
    let mu = res.rows;
    let cp = char_poly(res)?;
    let (roots, rest) = rational_root_factor(&cp)?;
    if !rest.is_constant() {
        return Err(Error::NonQuasiUnipotent {
            factor: rest.render("S"),
        });
    }
    let mut spaces = Vec::new();
    let mut total = 0;
    for (gamma, mult) in roots {
        let mut shifted = res.clone();
        for i in 0..mu {
            shifted[(i, i)] -= &gamma;
        }
        // ker (R - gamma)^mult is the full generalized eigenspace.
        let powered = shifted.pow(mult);
        let basis = powered.null_space();
        total += basis.len();
        spaces.push((gamma, basis));
    }
    if total != mu {
        return Err(Error::Inconsistency(
            "generalized eigenspaces do not fill the space".into(),
        ));
    }
    Ok(EigenSplit { spaces })
}

/// Shear the lattice until every residue eigenvalue lies in [c_low, c_low + 1).
fn deligne_normalize(
    start: &TauLattice,
    t_mat: &ThetaMatrix,
    c_low: &Rational,
) -> Result<(TauLattice, QMatrix)> {
    let mu = start.mu;
    let mut lat = start.clone();
    let one = Rational::one();
    let mut passes = 0usize;
    loop {
        let res = lat
            .residue(t_mat)
            .ok_or_else(|| Error::Inconsistency("lattice lost logarithmicity".into()))?;
        let split = eigen_split(&res)?;
        let c_high = c_low + &one;
        let any_low = split.spaces.iter().any(|(g, _)| g < c_low);
        let any_high = split.spaces.iter().any(|(g, _)| g >= &c_high);
        if !any_low && !any_high {
            return Ok((lat, res));
        }
        // One unit per pass keeps the sheared lattice logarithmic (generator
        // tau-exponents must stay within one of each other). All groups
        // moving in the same direction shear together: multiplying a group
        // by tau shifts its eigenvalue by +1, by theta by -1.
        let budget: i64 = split
            .spaces
            .iter()
            .map(|(g, basis)| {
                let d = if g < c_low {
                    floor_i64(&(c_low - g)) + 1
                } else if *g >= c_high {
                    floor_i64(&(g - c_low))
                } else {
                    0
                };
                d * basis.len() as i64
            })
            .sum();
        passes += 1;
        if passes as i64 > budget + 4 {
            return Err(Error::Inconsistency(
                "Deligne normalization did not converge".into(),
            ));
        }

        let basis = lat.basis();
        let mut gens: Vec<LaurentVec> = Vec::with_capacity(mu);
        for (g, vectors) in &split.spaces {
            let shift_by = if any_low {
                if g < c_low {
                    -1
                } else {
                    0
                }
            } else if *g >= c_high {
                1
            } else {
                0
            };
            for vec in vectors {
                let mut combo = laurent::vec_zero(mu);
                for (c, coeff) in vec.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    combo = laurent::vec_add(&combo, &laurent::vec_scale(&basis[c], coeff));
                }
                gens.push(laurent::vec_shift(&combo, shift_by));
            }
        }
        lat = TauLattice::from_generators(mu, &gens)?;
    }
}

/// Per-class data of the V-filtration: the Deligne lattice V_alpha, its
/// residue, and gr_alpha^V realized as the generalized eigenspace at -alpha.
#[derive(Debug, Clone)]
pub struct ClassData {
    pub alpha: Rational,
    pub lattice: TauLattice,
    pub residue: QMatrix,
    /// Basis of gr_alpha (coordinates in the lattice basis classes).
    pub e_basis: Vec<Vec<Rational>>,
    /// Projection from lattice-class coordinates onto gr_alpha coordinates.
    pub projector: QMatrix,
    /// N = -(residue + alpha) restricted to gr_alpha, in e_basis coordinates.
    pub nilpotent: QMatrix,
    /// Per level k: dim(V_alpha cap G_k) and the image of V_alpha cap G_k in
    /// gr_alpha (RREF rows in e_basis coordinates).
    pub levels: Vec<LevelData>,
}

#[derive(Debug, Clone)]
pub struct LevelData {
    pub k: i64,
    pub delta: usize,
    pub gr_subspace: Vec<Vec<Rational>>,
}

impl ClassData {
    pub fn level(&self, k: i64) -> Option<&LevelData> {
        self.levels.iter().find(|l| l.k == k)
    }

    pub fn gr_dim(&self) -> usize {
        self.e_basis.len()
    }
}

/// One jump candidate beta of the V-filtration induced on G_0 / G_{-1}.
#[derive(Debug, Clone)]
pub struct JumpData {
    pub beta: Rational,
    /// dim(V_beta cap G_0).
    pub delta: usize,
    /// nu_beta.
    pub nu: u64,
    /// V_beta(G_0/G_{-1}) as RREF rows in Q^mu.
    pub subspace: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone)]
pub struct VFiltration {
    pub mu: usize,
    pub saturated: TauLattice,
    pub saturated_residue: QMatrix,
    pub classes: Vec<ClassData>,
    /// All scanned candidates, sorted by beta (zero jumps included).
    pub jumps: Vec<JumpData>,
    pub spectrum: SpectrumMultiset,
}

impl VFiltration {
    pub fn jump_multiplicity(&self, idx: usize) -> u64 {
        self.jumps[idx].nu
    }

    /// V_{<beta}(G_0/G_{-1}) for the jump at `idx`: the previous candidate's subspace.
    pub fn subspace_strictly_below(&self, idx: usize) -> &[Vec<Rational>] {
        if idx == 0 {
            &[]
        } else {
            &self.jumps[idx - 1].subspace
        }
    }

    /// V_beta(G_0/G_{-1}) for arbitrary beta: the largest candidate <= beta.
    pub fn subspace_at_or_below(&self, beta: &Rational) -> &[Vec<Rational>] {
        let mut best: Option<usize> = None;
        for (i, j) in self.jumps.iter().enumerate() {
            if &j.beta <= beta {
                best = Some(i);
            } else {
                break;
            }
        }
        match best {
            Some(i) => &self.jumps[i].subspace,
            None => &[],
        }
    }
}

/// Solutions of x in lattice with theta-order >= -k, by windowed linear algebra.
///
/// Returns per solution: the class vector p(0) in lattice-basis-class
/// coordinates and the coefficient-of-theta^{-k} vector in Q^mu.
struct GkSolutions {
    class_vectors: Vec<Vec<Rational>>,
    bottom_vectors: Vec<Vec<Rational>>,
}

fn lattice_cap_gk(lat: &TauLattice, k: i64) -> Result<GkSolutions> {
    let mu = lat.mu;
    let basis = lat.basis();
    let min_ord = basis
        .iter()
        .filter_map(laurent::vec_min_ord)
        .min()
        .unwrap_or(0);
    let max_ord = basis
        .iter()
        .filter_map(laurent::vec_max_ord)
        .max()
        .unwrap_or(0);
    let hard_cap = 4 * mu + 2 * (min_ord.unsigned_abs().max(max_ord.unsigned_abs()) as usize) + 4;

    let solve_at = |d: usize| -> Vec<Vec<Rational>> {
        // Unknowns p_{c, j}, c in 0..mu, j in 0..=d. Constraints: every
        // theta-coefficient of x = sum p_c(tau) w_c below -k vanishes.
        let cols = mu * (d + 1);
        let lo = min_ord - d as i64;
        let hi = -k - 1;
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for coord in 0..mu {
            for m in lo..=hi {
                let mut row = vec![Rational::zero(); cols];
                let mut nonzero = false;
                for c in 0..mu {
                    for j in 0..=d {
                        // theta^{-j} * w_c: coefficient of theta^m is w_c[coord] at m + j.
                        let v = basis[c][coord].coeff(m + j as i64);
                        if !v.is_zero() {
                            nonzero = true;
                        }
                        row[c * (d + 1) + j] = v;
                    }
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            // No constraints: the full parameter space solves.
            let mut id = Vec::new();
            for i in 0..cols {
                let mut v = vec![Rational::zero(); cols];
                v[i] = Rational::one();
                id.push(v);
            }
            return id;
        }
        QMatrix::from_rows(rows).null_space()
    };

    let mut d = 1usize;
    let mut prev_dims: Vec<usize> = Vec::new();
    loop {
        let sols = solve_at(d);
        prev_dims.push(sols.len());
        let n = prev_dims.len();
        let stable = n >= 3
            && prev_dims[n - 1] == prev_dims[n - 2]
            && prev_dims[n - 2] == prev_dims[n - 3];
        if stable {
            // Extract the data from the solutions at the stabilized degree.
            let mut class_vectors = Vec::new();
            let mut bottom_vectors = Vec::new();
            for sol in &sols {
                let mut class_v = vec![Rational::zero(); mu];
                let mut bottom_v = vec![Rational::zero(); mu];
                for c in 0..mu {
                    class_v[c] = sol[c * (d + 1)].clone();
                }
                for coord in 0..mu {
                    let mut acc = Rational::zero();
                    for c in 0..mu {
                        for j in 0..=d {
                            let w = basis[c][coord].coeff(-k + j as i64);
                            if !w.is_zero() {
                                acc += &sol[c * (d + 1) + j] * w;
                            }
                        }
                    }
                    bottom_v[coord] = acc;
                }
                class_vectors.push(class_v);
                bottom_vectors.push(bottom_v);
            }
            return Ok(GkSolutions {
                class_vectors,
                bottom_vectors,
            });
        }
        d += 1;
        if d > hard_cap {
            return Err(Error::DegreeCap { cap: hard_cap });
        }
    }
}

/// Tunables for the V-filtration scan.
#[derive(Debug, Clone, Copy, Default)]
pub struct VOptions {
    /// Override for the window-extension cap (default 4 mu + 8).
    pub window_cap: Option<usize>,
}

/// The Malgrange-Kashiwara V-filtration of the lattice pair, with the induced
/// filtration data on G_0 / G_{-1} and on each gr_alpha.
pub fn v_filtration(lp: &LatticePair) -> Result<VFiltration> {
    v_filtration_with(lp, VOptions::default())
}

pub fn v_filtration_with(lp: &LatticePair, opts: VOptions) -> Result<VFiltration> {
    let mu = lp.mu;
    if mu == 0 {
        return Ok(VFiltration {
            mu,
            saturated: TauLattice::standard(0),
            saturated_residue: QMatrix::zero(0, 0),
            classes: Vec::new(),
            jumps: Vec::new(),
            spectrum: SpectrumMultiset::empty(),
        });
    }
    let (saturated, saturated_residue) = saturate_log_lattice(lp)?;
    let split = eigen_split(&saturated_residue)?;

    // Group candidate jumps by class alpha = frac(-gamma).
    let mut class_ms: BTreeMap<Rational, Vec<i64>> = BTreeMap::new();
    for (gamma, basis) in &split.spaces {
        let beta0 = -gamma;
        let alpha = frac_part(&beta0);
        let m = floor_i64(&beta0);
        class_ms
            .entry(alpha)
            .or_default()
            .extend(std::iter::repeat(m).take(basis.len()));
    }
    let mut k_lo = class_ms
        .values()
        .flatten()
        .min()
        .copied()
        .expect("nonempty")
        - 1;
    let mut k_hi = class_ms
        .values()
        .flatten()
        .max()
        .copied()
        .expect("nonempty")
        + 1;

    // Deligne lattice and gr data per class.
    let mut classes: Vec<ClassData> = Vec::new();
    for alpha in class_ms.keys() {
        let (lattice, residue) = deligne_normalize(&saturated, &lp.t_matrix, &(-alpha))?;
        let class_split = eigen_split(&residue)?;
        let target = -alpha;
        let mut e_basis = Vec::new();
        let mut other_basis = Vec::new();
        for (g, vectors) in &class_split.spaces {
            if *g == target {
                e_basis.extend(vectors.iter().cloned());
            } else {
                other_basis.extend(vectors.iter().cloned());
            }
        }
        if e_basis.is_empty() {
            return Err(Error::Inconsistency(format!(
                "class {alpha} lost its eigenvalue after normalization"
            )));
        }
        let gr_dim = e_basis.len();
        // Adapted basis M = [E | others]; projector = first gr_dim rows of M^{-1}.
        let mut cols = e_basis.clone();
        cols.extend(other_basis.iter().cloned());
        let m_adapt = QMatrix::from_rows(cols).transpose();
        let m_inv = m_adapt.inverse()?;
        let projector = QMatrix::from_fn(gr_dim, mu, |i, j| m_inv[(i, j)].clone());
        // N = -(R|_E + alpha) in e_basis coordinates.
        let e_cols = QMatrix::from_rows(e_basis.clone()).transpose();
        let r_on_e = projector.mul(&residue.mul(&e_cols));
        let mut nilpotent = r_on_e.scale(&-Rational::one());
        for i in 0..gr_dim {
            nilpotent[(i, i)] -= alpha;
        }
        classes.push(ClassData {
            alpha: alpha.clone(),
            lattice,
            residue,
            e_basis,
            projector,
            nilpotent,
            levels: Vec::new(),
        });
    }

    // Scan deltas over the candidate window, extending until the filtration
    // is exhausted below and saturates mu above.
    let extension_cap = opts.window_cap.unwrap_or(4 * mu + 8);
    let mut extensions = 0usize;
    let mut cache: BTreeMap<(usize, i64), (usize, Vec<Vec<Rational>>, Vec<Vec<Rational>>)> =
        BTreeMap::new();
    let jumps = loop {
        for (ci, class) in classes.iter().enumerate() {
            for k in (k_lo - 1)..=k_hi {
                if cache.contains_key(&(ci, k)) {
                    continue;
                }
                let sols = lattice_cap_gk(&class.lattice, k)?;
                let delta = sols.class_vectors.len();
                let bottom = row_space_basis(&sols.bottom_vectors, mu);
                // Image of V_alpha cap G_k in gr_alpha.
                let gr_vecs: Vec<Vec<Rational>> = sols
                    .class_vectors
                    .iter()
                    .map(|v| class.projector.mul_vec(v))
                    .collect();
                let gr_sub = row_space_basis(&gr_vecs, class.gr_dim());
                cache.insert((ci, k), (delta, bottom, gr_sub));
            }
        }
        // Candidates sorted by beta.
        let mut candidates: Vec<(Rational, usize, i64)> = Vec::new();
        for (ci, class) in classes.iter().enumerate() {
            for k in k_lo..=k_hi {
                candidates.push((
                    &class.alpha + Rational::from_integer(k.into()),
                    ci,
                    k,
                ));
            }
        }
        candidates.sort_by(|a, b| a.0.cmp(&b.0));

        let d_of = |ci: usize, k: i64| -> usize {
            let (delta, _, _) = &cache[&(ci, k)];
            let (delta_prev, _, _) = &cache[&(ci, k - 1)];
            delta - delta_prev
        };
        let first = candidates.first().expect("nonempty window");
        let last = candidates.last().expect("nonempty window");
        let d_first = d_of(first.1, first.2);
        let d_last = d_of(last.1, last.2);
        if d_first != 0 {
            k_lo -= 1;
        }
        if d_last != mu {
            k_hi += 1;
        }
        if d_first == 0 && d_last == mu {
            // Assemble jump data.
            let mut jumps: Vec<JumpData> = Vec::new();
            let mut prev_d = 0usize;
            for (beta, ci, k) in candidates {
                let (delta, bottom, _) = &cache[&(ci, k)];
                let d_here = d_of(ci, k);
                if d_here < prev_d {
                    return Err(Error::Inconsistency(
                        "induced filtration dimensions are not monotone".into(),
                    ));
                }
                if bottom.len() != d_here {
                    return Err(Error::Inconsistency(format!(
                        "subspace dimension {} disagrees with delta difference {} at beta = {}",
                        bottom.len(),
                        d_here,
                        beta
                    )));
                }
                let nu = (d_here - prev_d) as u64;
                prev_d = d_here;
                jumps.push(JumpData {
                    beta,
                    delta: *delta,
                    nu,
                    subspace: bottom.clone(),
                });
            }
            break jumps;
        }
        extensions += 1;
        if extensions > extension_cap {
            let reached = d_last;
            return Err(Error::WindowCap { mu, reached });
        }
    };

    // Fill per-class level data from the cache.
    for (ci, class) in classes.iter_mut().enumerate() {
        for k in (k_lo - 1)..=k_hi {
            if let Some((delta, _, gr_sub)) = cache.get(&(ci, k)) {
                class.levels.push(LevelData {
                    k,
                    delta: *delta,
                    gr_subspace: gr_sub.clone(),
                });
            }
        }
    }

    let mut spectrum = SpectrumMultiset::empty();
    for j in &jumps {
        spectrum.insert(j.beta.clone(), j.nu);
    }
    if spectrum.total() != mu {
        return Err(Error::WindowCap {
            mu,
            reached: spectrum.total(),
        });
    }

    Ok(VFiltration {
        mu,
        saturated,
        saturated_residue,
        classes,
        jumps,
        spectrum,
    })
}

/// The spectrum of the lattice pair via the V-filtration.
pub fn spectrum_v(lp: &LatticePair) -> Result<SpectrumMultiset> {
    Ok(v_filtration(lp)?.spectrum)
}

// --- abstract lattice pair JSON wire format ---

#[derive(Serialize, Deserialize)]
struct LatticePairWire {
    mu: usize,
    /// t_matrix[i][j] = theta-coefficient array of the (i, j) entry, where
    /// row i expands t.g_i.
    t_matrix: Vec<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<i64>,
}

pub fn lattice_pair_to_json(lp: &LatticePair) -> serde_json::Value {
    let t_matrix: Vec<Vec<Vec<String>>> = (0..lp.mu)
        .map(|i| {
            (0..lp.mu)
                .map(|j| {
                    lp.t_matrix
                        .get(i, j)
                        .coeffs()
                        .iter()
                        .map(render_rational)
                        .collect()
                })
                .collect()
        })
        .collect();
    serde_json::to_value(LatticePairWire {
        mu: lp.mu,
        t_matrix,
        weight: lp.weight_w,
    })
    .expect("serializable")
}

pub fn lattice_pair_from_json(value: &serde_json::Value) -> Result<LatticePair> {
    let wire: LatticePairWire = serde_json::from_value(value.clone())
        .map_err(|e| Error::InvalidLattice(e.to_string()))?;
    if wire.t_matrix.len() != wire.mu {
        return Err(Error::InvalidLattice(format!(
            "t_matrix has {} rows, expected mu = {}",
            wire.t_matrix.len(),
            wire.mu
        )));
    }
    let mut t = ThetaMatrix::zero(wire.mu);
    for (i, row) in wire.t_matrix.iter().enumerate() {
        if row.len() != wire.mu {
            return Err(Error::InvalidLattice(format!(
                "row {i} has {} entries, expected {}",
                row.len(),
                wire.mu
            )));
        }
        for (j, entry) in row.iter().enumerate() {
            let coeffs: Vec<Rational> = entry
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<_>>()
                .map_err(|e| Error::InvalidLattice(e.to_string()))?;
            t.set(i, j, UniPoly::new(coeffs));
        }
    }
    Ok(LatticePair {
        mu: wire.mu,
        t_matrix: t,
        weight_w: wire.weight,
        provenance: "abstract".to_string(),
    })
}
