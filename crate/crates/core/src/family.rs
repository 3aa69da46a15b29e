//! Validated constructors for the classified families of weakly-irreducible subalgebras
//! (`g^{...}`) and holonomy algebras (`hol^{...}`).

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::ambient::SevenTuple;
use crate::error::{ForgeError, Result};
use crate::lie::LieAlgebra;
use crate::linalg::{solve_combination, Matrix, Subspace};
use crate::scalar::{q, qr, QValue, Q};
use crate::standard::{self as st, StandardTag};

macro_rules! family_tags {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Family tags of the classification.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum FamilyTag { $($variant),* }

        impl FamilyTag {
            pub const ALL: &'static [FamilyTag] = &[$(FamilyTag::$variant),*];
            pub fn as_str(&self) -> &'static str {
                match self { $(FamilyTag::$variant => $name),* }
            }
        }

        impl FromStr for FamilyTag {
            type Err = ForgeError;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(FamilyTag::$variant),)*
                    _ => Err(ForgeError::Parse(format!("unknown family tag {s:?}"))),
                }
            }
        }
    };
}

family_tags! {
    Hol1N0 => "hol1_n0",
    Hol2N0 => "hol2_n0",
    HolGammaN0 => "hol_gamma_n0",
    HolA1TildeA2 => "hol_m_u_A1_tildeA2",
    HolA1Phi => "hol_m_u_A1_phi",
    HolVarphiPhi => "hol_m_u_varphi_phi",
    HolVarphiTildeA2 => "hol_m_u_varphi_tildeA2",
    HolLambda => "hol_m_u_lambda",
    HolNPsi => "hol_n_u_psi_k_l",
    HolMPsi => "hol_m_u_psi_k_l_r",
    GA1 => "g_m_h_A1",
    GVarphi => "g_m_h_varphi",
    GNPsi => "g_n_h_psi_k_l",
    GMPsi => "g_m_h_psi_k_l_r",
    G0Psi => "g_0_h_psi_k",
    G0Zeta => "g_0_h_zeta",
    G0PsiZeta => "g_0_h_psi_k_zeta",
    G0A1Zeta => "g_0_h_A1_zeta",
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FamilyTag {
    pub fn is_hol(&self) -> bool {
        self.as_str().starts_with("hol")
    }
    /// The `m`-families whose ideal is `N^1 + N^2_{1..m} + C`.
    fn uses_m_ideal(&self) -> bool {
        matches!(
            self,
            FamilyTag::HolA1TildeA2
                | FamilyTag::HolA1Phi
                | FamilyTag::HolVarphiPhi
                | FamilyTag::HolVarphiTildeA2
                | FamilyTag::HolLambda
                | FamilyTag::GA1
                | FamilyTag::GVarphi
        )
    }
}

/// A subalgebra given by a standard tag, a list of seven-tuples, or a list of matrices.
/// The listed elements form the input basis on which the maps are specified.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubalgebraInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seven_tuples: Option<Vec<SevenTuple>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<QValue>>>>,
}

impl SubalgebraInput {
    pub fn standard(tag: &str) -> Self {
        SubalgebraInput { standard: Some(tag.into()), ..Default::default() }
    }

    pub fn tuples(ts: Vec<SevenTuple>) -> Self {
        SubalgebraInput { seven_tuples: Some(ts), ..Default::default() }
    }

    /// The input basis as seven-tuples.
    pub fn resolve(&self, n: usize) -> Result<Vec<SevenTuple>> {
        let given = [self.standard.is_some(), self.seven_tuples.is_some(), self.matrices.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(ForgeError::Parse(
                "subalgebra must be given by exactly one of standard, seven_tuples, matrices".into(),
            ));
        }
        if let Some(tag) = &self.standard {
            let tag: StandardTag = tag.parse()?;
            return st::standard_tuples(tag, n);
        }
        if let Some(ts) = &self.seven_tuples {
            for t in ts {
                if t.inferred_n()? != n {
                    return Err(ForgeError::Dimension(format!(
                        "seven-tuple of size {} for n = {n}",
                        t.z1.len()
                    )));
                }
            }
            return Ok(ts.clone());
        }
        let mats = self.matrices.as_ref().expect("checked above");
        mats.iter()
            .map(|rows| {
                let m = Matrix::from_rows(rows.iter().map(|r| crate::scalar::unwrap_qvalues(r)).collect())?;
                SevenTuple::from_matrix(n, &m)
            })
            .collect()
    }
}

/// Value of `psi` on one basis element, in `E`-coordinates: `z1` along `e_i`, `z2` along `f_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiValue {
    #[serde(default)]
    pub z1: Vec<QValue>,
    #[serde(default)]
    pub z2: Vec<QValue>,
}

/// Input selecting one classified family.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub family: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<QValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<QValue>>,
    /// `u` for the holonomy families, `h` for the others.
    #[serde(default, alias = "h", skip_serializing_if = "Option::is_none")]
    pub u: Option<SubalgebraInput>,
    /// `a1`-valued map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varphi: Option<Vec<QValue>>,
    /// `a2`-valued map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<QValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<PsiValue>>,
    /// `C`-valued map on `h`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Vec<QValue>>,
    /// The scalar `zeta` of `g_0_h_A1_zeta` (value on the generator of `A^1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_a1: Option<QValue>,
}

impl FamilySpec {
    pub fn new(family: FamilyTag, n: usize) -> Self {
        FamilySpec { family: family.as_str().into(), n, ..Default::default() }
    }
}

/// A built family with the parameters consumed by the metric construction.
#[derive(Clone, Debug)]
pub struct BuiltFamily {
    pub tag: FamilyTag,
    pub spec: FamilySpec,
    pub n: usize,
    pub algebra: LieAlgebra,
    /// `u` (or `h`) as a subalgebra of `u(n)`.
    pub u: LieAlgebra,
    /// `A_1..A_N`: a basis of `u'` followed by a basis of `z(u)`.
    pub u_basis: Vec<SevenTuple>,
    /// `N_1 = dim u'`.
    pub n1: usize,
    /// `u` acts trivially exactly on `E_{n0+1..n}`, when that subspace is coordinate-aligned.
    pub n0: Option<usize>,
    pub varphi: Vec<Q>,
    pub phi: Vec<Q>,
    /// `psi(A_alpha)` as `(z1, z2)`.
    pub psi: Vec<(Vec<Q>, Vec<Q>)>,
    pub zeta: Vec<Q>,
}

impl BuiltFamily {
    pub fn m(&self) -> usize {
        self.spec.m.unwrap_or(0)
    }
    pub fn dim_u(&self) -> usize {
        self.u_basis.len()
    }
}

fn constraint(msg: impl Into<String>) -> ForgeError {
    ForgeError::Constraint(msg.into())
}

fn need<T: Clone>(v: &Option<T>, name: &str, tag: FamilyTag) -> Result<T> {
    v.clone().ok_or_else(|| ForgeError::Parse(format!("family {tag} requires parameter `{name}`")))
}

fn mats(n: usize, ts: &[SevenTuple]) -> Vec<Matrix> {
    ts.iter().map(|t| t.to_matrix(n).expect("sizes checked")).collect()
}

fn is_pure_block(t: &SevenTuple) -> bool {
    t.a1.is_zero()
        && t.a2.is_zero()
        && t.c.is_zero()
        && t.z1.iter().all(Zero::is_zero)
        && t.z2.iter().all(Zero::is_zero)
        && t.satisfies_block_constraints()
}

/// `J_k - k/(n+2) J_n` as a `C`-block element.
fn j_shift_elem(n: usize, k: usize) -> SevenTuple {
    let mut t = SevenTuple::zero(n);
    let s = qr(k as i64, n as i64 + 2);
    for i in 1..=n {
        t.c_sym[i - 1][i - 1] = if i <= k { Q::one() - &s } else { -s.clone() };
    }
    t
}

fn span_contains(n: usize, outer: &[SevenTuple], inner: &LieAlgebra) -> bool {
    let d = 2 * n + 4;
    let sp = Subspace::from_spanning(d * d, mats(n, outer).iter().map(Matrix::flatten).collect());
    sp.contains(inner.span()).unwrap_or(false)
}

/// Evaluates a map given on the input basis at each canonical basis element.
fn on_canonical<T: Clone>(
    coeffs: &[Vec<Q>],
    values: &[T],
    zero: T,
    axpy: impl Fn(&mut T, &Q, &T),
) -> Vec<T> {
    coeffs
        .iter()
        .map(|c| {
            let mut acc = zero.clone();
            for (ci, v) in c.iter().zip(values) {
                if !ci.is_zero() {
                    axpy(&mut acc, ci, v);
                }
            }
            acc
        })
        .collect()
}

/// Common kernel of `u` on `E`, returned as `n0` when it is `span{e_i, f_i : i > n0}`.
pub fn trivial_block_start(n: usize, u_basis: &[SevenTuple]) -> Option<usize> {
    if n == 0 {
        return Some(0);
    }
    let mut rows = Vec::new();
    for t in u_basis {
        // Rows of [[B, -C], [C, B]] on E = E^1 + E^2.
        for i in 0..n {
            let mut r1 = vec![Q::zero(); 2 * n];
            let mut r2 = vec![Q::zero(); 2 * n];
            for j in 0..n {
                r1[j] = t.b[i][j].clone();
                r1[n + j] = -t.c_sym[i][j].clone();
                r2[j] = t.c_sym[i][j].clone();
                r2[n + j] = t.b[i][j].clone();
            }
            rows.push(r1);
            rows.push(r2);
        }
    }
    let kernel = if rows.is_empty() {
        Subspace::full(2 * n)
    } else {
        Matrix::from_rows(rows).expect("rectangular").nullspace()
    };
    if kernel.dim() % 2 != 0 {
        return None;
    }
    let n0 = n - kernel.dim() / 2;
    let mut aligned = Vec::new();
    for i in n0..n {
        let mut e = vec![Q::zero(); 2 * n];
        e[i] = Q::one();
        let mut f = vec![Q::zero(); 2 * n];
        f[n + i] = Q::one();
        aligned.push(e);
        aligned.push(f);
    }
    (Subspace::from_spanning(2 * n, aligned) == kernel).then_some(n0)
}

struct UData {
    alg: LieAlgebra,
    basis: Vec<SevenTuple>,
    n1: usize,
    /// Coordinates of each canonical basis element in the input basis.
    coeffs: Vec<Vec<Q>>,
    input_len: usize,
}

fn prepare_u(n: usize, input: &[SevenTuple]) -> Result<UData> {
    for t in input {
        if !is_pure_block(t) {
            return Err(constraint(
                "u must consist of elements (0,0,B,C,0,0,0) with B skew-symmetric and C symmetric",
            ));
        }
    }
    let d = 2 * n + 4;
    let flat: Vec<Vec<Q>> = mats(n, input).iter().map(Matrix::flatten).collect();
    if Subspace::from_spanning(d * d, flat.clone()).dim() != input.len() {
        return Err(constraint("the listed basis of u is linearly dependent"));
    }
    let alg = LieAlgebra::from_spanning(d, &mats(n, input))?;
    if !alg.is_reductive_split() {
        return Err(constraint("u must split as u' + z(u)"));
    }
    let to_tuple = |v: &Vec<Q>| {
        let m = Matrix::from_flat(d, d, v.clone()).expect("square");
        SevenTuple::from_matrix(n, &m).expect("inside the stabilizer")
    };
    let mut basis: Vec<SevenTuple> = alg.derived().basis().iter().map(to_tuple).collect();
    let n1 = basis.len();
    basis.extend(alg.center().basis().iter().map(to_tuple));
    let coeffs = basis
        .iter()
        .map(|t| {
            solve_combination(&flat, &t.to_matrix(n).expect("sized").flatten())
                .expect("canonical basis lies in the span")
        })
        .collect();
    Ok(UData { alg, basis, n1, coeffs, input_len: input.len() })
}

fn scalar_map(u: &UData, vals: &Option<Vec<QValue>>, name: &str, tag: FamilyTag) -> Result<Vec<Q>> {
    let vals = need(vals, name, tag)?;
    if vals.len() != u.input_len {
        return Err(ForgeError::Dimension(format!(
            "`{name}` has {} values but u has {} basis elements",
            vals.len(),
            u.input_len
        )));
    }
    let raw = crate::scalar::unwrap_qvalues(&vals);
    let out = on_canonical(&u.coeffs, &raw, Q::zero(), |acc, c, v| *acc += c * v);
    if out[..u.n1].iter().any(|x| !x.is_zero()) {
        return Err(constraint(format!("{name} must vanish on u'")));
    }
    Ok(out)
}

type PsiVec = (Vec<Q>, Vec<Q>);

/// `psi` on the canonical basis. `target` lists the allowed `(z1 range, z2 range)` supports.
fn psi_map(
    n: usize,
    u: &UData,
    vals: &Option<Vec<PsiValue>>,
    tag: FamilyTag,
    z1_target: &[(usize, usize)],
    z2_target: &[(usize, usize)],
    target_name: &str,
) -> Result<Vec<PsiVec>> {
    let vals = need(vals, "psi", tag)?;
    if vals.len() != u.input_len {
        return Err(ForgeError::Dimension(format!(
            "`psi` has {} values but u has {} basis elements",
            vals.len(),
            u.input_len
        )));
    }
    let mut raw = Vec::new();
    for v in &vals {
        let pad = |xs: &[QValue]| -> Result<Vec<Q>> {
            if xs.is_empty() {
                return Ok(vec![Q::zero(); n]);
            }
            if xs.len() != n {
                return Err(ForgeError::Dimension(format!("psi component of length {} for n = {n}", xs.len())));
            }
            Ok(crate::scalar::unwrap_qvalues(xs))
        };
        raw.push((pad(&v.z1)?, pad(&v.z2)?));
    }
    let inside = |i: usize, ranges: &[(usize, usize)]| ranges.iter().any(|&(a, b)| a <= i && i <= b);
    for (z1, z2) in &raw {
        for i in 1..=n {
            if (!z1[i - 1].is_zero() && !inside(i, z1_target)) || (!z2[i - 1].is_zero() && !inside(i, z2_target)) {
                return Err(constraint(format!("psi must take values in {target_name}")));
            }
        }
    }
    let zero = (vec![Q::zero(); n], vec![Q::zero(); n]);
    let out = on_canonical(&u.coeffs, &raw, zero, |acc, c, v| {
        for i in 0..n {
            acc.0[i] += c * &v.0[i];
            acc.1[i] += c * &v.1[i];
        }
    });
    if out[..u.n1].iter().any(|(a, b)| a.iter().chain(b).any(|x| !x.is_zero())) {
        return Err(constraint("psi must vanish on u'"));
    }
    let target_dim: usize = z1_target.iter().chain(z2_target).map(|&(a, b)| (b + 1).saturating_sub(a)).sum();
    let rank = Subspace::from_spanning(
        2 * n,
        out.iter().map(|(a, b)| a.iter().chain(b).cloned().collect()).collect(),
    )
    .dim();
    if rank != target_dim {
        return Err(constraint(format!("psi must be surjective onto {target_name} (rank {rank}, target dimension {target_dim})")));
    }
    Ok(out)
}

fn check_chain(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(constraint(what.to_string()))
    }
}

/// Builds and validates the family selected by `spec`.
pub fn build_family(spec: &FamilySpec) -> Result<BuiltFamily> {
    let tag: FamilyTag = spec.family.parse()?;
    let n = spec.n;
    let d = 2 * n + 4;
    let n0_only = |fam: FamilyTag| -> Result<()> {
        check_chain(n == 0, &format!("family {fam} requires n = 0"))
    };

    let empty_u = UData {
        alg: LieAlgebra::zero(d),
        basis: vec![],
        n1: 0,
        coeffs: vec![],
        input_len: 0,
    };
    let mut gens: Vec<SevenTuple> = Vec::new();
    let mut expected_dim;
    let mut varphi = Vec::new();
    let mut phi = Vec::new();
    let mut psi: Vec<PsiVec> = Vec::new();
    let mut zeta = Vec::new();

    let u = match tag {
        FamilyTag::Hol1N0 | FamilyTag::Hol2N0 | FamilyTag::HolGammaN0 => {
            n0_only(tag)?;
            empty_u
        }
        _ => {
            check_chain(n >= 1, &format!("family {tag} requires n >= 1"))?;
            let input = need(&spec.u, "u", tag)?.resolve(n)?;
            prepare_u(n, &input)?
        }
    };

    match tag {
        FamilyTag::Hol1N0 => {
            gens = st::full_elems(0);
            expected_dim = 3;
        }
        FamilyTag::Hol2N0 => {
            gens = vec![st::a1_elem(0), st::a2_elem(0)];
            expected_dim = 2;
        }
        FamilyTag::HolGammaN0 => {
            let g = need(&spec.gamma, "gamma", tag)?;
            if g.len() != 2 {
                return Err(ForgeError::Dimension("gamma must have two entries".into()));
            }
            let mut t = SevenTuple::zero(0);
            t.a1 = g[0].0.clone();
            t.a2 = g[1].0.clone();
            let nonzero = !(t.a1.is_zero() && t.a2.is_zero());
            gens = vec![t, st::c_elem(0)];
            expected_dim = if nonzero { 2 } else { 1 };
        }
        _ if tag.uses_m_ideal() => {
            let m = need(&spec.m, "m", tag)?;
            check_chain(m <= n, "0 <= m <= n")?;
            let outer: Vec<SevenTuple> = if tag.is_hol() {
                st::u_block_elems(n, 1, m)
            } else {
                let mut o = st::su_block_elems(n, 1, m);
                if m > 0 {
                    o.push(j_shift_elem(n, m));
                }
                o.extend(st::sod_elems(n, m + 1, n));
                o
            };
            if !span_contains(n, &outer, &u.alg) {
                return Err(constraint(if tag.is_hol() {
                    "u must be a subalgebra of u(m)"
                } else {
                    "h must be a subalgebra of su(m) + R(J_m - m/(n+2) J_n) + sod(m+1..n)"
                }));
            }
            let big_n = u.basis.len();
            let ta2 = st::tilde_a2_elem(n, m);
            let a1 = st::a1_elem(n);
            let a2 = st::a2_elem(n);
            expected_dim = big_n + n + m + 1;
            match tag {
                FamilyTag::HolA1TildeA2 => {
                    gens.push(a1.clone());
                    gens.push(ta2.clone());
                    gens.extend(u.basis.iter().cloned());
                    expected_dim += 2;
                }
                FamilyTag::HolA1Phi => {
                    phi = scalar_map(&u, &spec.phi, "phi", tag)?;
                    gens.push(a1.clone());
                    for (a, p) in u.basis.iter().zip(&phi) {
                        let mut t = a.clone();
                        t.add_scaled(p, &ta2);
                        gens.push(t);
                    }
                    expected_dim += 1;
                }
                FamilyTag::HolVarphiPhi => {
                    varphi = scalar_map(&u, &spec.varphi, "varphi", tag)?;
                    phi = scalar_map(&u, &spec.phi, "phi", tag)?;
                    for ((a, v), p) in u.basis.iter().zip(&varphi).zip(&phi) {
                        let mut t = a.clone();
                        t.add_scaled(v, &a1);
                        t.add_scaled(p, &ta2);
                        gens.push(t);
                    }
                }
                FamilyTag::HolVarphiTildeA2 => {
                    varphi = scalar_map(&u, &spec.varphi, "varphi", tag)?;
                    gens.push(ta2.clone());
                    for (a, v) in u.basis.iter().zip(&varphi) {
                        let mut t = a.clone();
                        t.add_scaled(v, &a1);
                        gens.push(t);
                    }
                    expected_dim += 1;
                }
                FamilyTag::HolLambda => {
                    let lambda = need(&spec.lambda, "lambda", tag)?.0;
                    check_chain(!lambda.is_zero(), "lambda != 0")?;
                    let mut t = a1.clone();
                    t.add_scaled(&lambda, &ta2);
                    gens.push(t);
                    gens.extend(u.basis.iter().cloned());
                    expected_dim += 1;
                }
                FamilyTag::GA1 => {
                    gens.push(a1.clone());
                    for a in &u.basis {
                        let mut t = a.clone();
                        t.add_scaled(&(-a.trace_c() / q(2)), &a2);
                        gens.push(t);
                    }
                    expected_dim += 1;
                }
                FamilyTag::GVarphi => {
                    varphi = scalar_map(&u, &spec.varphi, "varphi", tag)?;
                    for (a, v) in u.basis.iter().zip(&varphi) {
                        let mut t = a.clone();
                        t.add_scaled(v, &a1);
                        t.add_scaled(&(-a.trace_c() / q(2)), &a2);
                        gens.push(t);
                    }
                }
                _ => unreachable!(),
            }
            gens.extend(st::n1_elems(n, 1, n));
            gens.extend(st::n2_elems(n, 1, m));
            gens.push(st::c_elem(n));
        }
        FamilyTag::HolNPsi | FamilyTag::GNPsi => {
            let k = need(&spec.k, "k", tag)?;
            let l = need(&spec.l, "l", tag)?;
            check_chain(0 < k && k <= l && l <= n, "0 < k <= l <= n")?;
            let outer = if tag.is_hol() {
                st::u_block_elems(n, 1, k)
            } else {
                let mut o = st::su_block_elems(n, 1, k);
                o.push(j_shift_elem(n, k));
                o
            };
            if !span_contains(n, &outer, &u.alg) {
                return Err(constraint(if tag.is_hol() {
                    "u must be a subalgebra of u(k)"
                } else {
                    "h must be a subalgebra of su(k) + R(J_k - k/(n+2) J_n)"
                }));
            }
            let zdim = u.basis.len() - u.n1;
            check_chain(zdim + 2 * k >= n + l, "dim z(u) >= n+l-2k")?;
            psi = psi_map(
                n,
                &u,
                &spec.psi,
                tag,
                &[(k + 1, l)],
                &[(k + 1, n)],
                "E^1_{k+1..l} + E^2_{k+1..l} + E^2_{l+1..n}",
            )?;
            for (a, (z1, z2)) in u.basis.iter().zip(&psi) {
                let mut t = a.clone();
                t.z1 = z1.clone();
                t.z2 = z2.clone();
                if !tag.is_hol() {
                    t.a2 = -a.trace_c() / q(2);
                }
                gens.push(t);
            }
            gens.extend(st::n1_elems(n, 1, k));
            gens.extend(st::n2_elems(n, 1, k));
            gens.extend(st::n1_elems(n, l + 1, n));
            gens.push(st::c_elem(n));
            expected_dim = u.basis.len() + 2 * k + (n - l) + 1;
        }
        FamilyTag::HolMPsi | FamilyTag::GMPsi => {
            let k = need(&spec.k, "k", tag)?;
            let l = need(&spec.l, "l", tag)?;
            let m = need(&spec.m, "m", tag)?;
            let r = need(&spec.r, "r", tag)?;
            check_chain(0 < k && k <= l && l <= m && m <= r && r <= n, "0 < k <= l <= m <= r <= n")?;
            check_chain(m < n, "0 < m < n")?;
            let outer = if tag.is_hol() {
                st::u_block_elems(n, 1, k)
            } else {
                let mut o = st::su_block_elems(n, 1, k);
                o.push(j_shift_elem(n, k));
                o.extend(st::sod_elems(n, m + 1, r));
                o
            };
            if !span_contains(n, &outer, &u.alg) {
                return Err(constraint(if tag.is_hol() {
                    "u must be a subalgebra of u(k)"
                } else {
                    "h must be a subalgebra of su(k) + R(J_k - k/(n+2) J_n) + sod(m+1..r)"
                }));
            }
            let zdim = u.basis.len() - u.n1;
            check_chain(zdim + 2 * k + r >= n + m + l, "dim z(u) >= n+m+l-2k-r")?;
            psi = psi_map(
                n,
                &u,
                &spec.psi,
                tag,
                &[(k + 1, l), (r + 1, n)],
                &[(k + 1, m)],
                "E^1_{k+1..l} + E^2_{k+1..l} + E^2_{l+1..m} + E^1_{r+1..n}",
            )?;
            for (a, (z1, z2)) in u.basis.iter().zip(&psi) {
                let mut t = a.clone();
                t.z1 = z1.clone();
                t.z2 = z2.clone();
                if !tag.is_hol() {
                    t.a2 = -a.trace_c() / q(2);
                }
                gens.push(t);
            }
            gens.extend(st::n1_elems(n, 1, k));
            gens.extend(st::n2_elems(n, 1, k));
            gens.extend(st::n1_elems(n, l + 1, r));
            gens.push(st::c_elem(n));
            expected_dim = u.basis.len() + 2 * k + (r - l) + 1;
        }
        FamilyTag::G0Psi | FamilyTag::G0PsiZeta => {
            let k = need(&spec.k, "k", tag)?;
            check_chain(0 < k && k < n, "0 < k < n")?;
            if !span_contains(n, &st::sod_elems(n, 1, k), &u.alg) {
                return Err(constraint("h must be a subalgebra of sod(1..k)"));
            }
            let zdim = u.basis.len() - u.n1;
            check_chain(zdim + k >= n, "dim z(h) >= n-k")?;
            psi = psi_map(n, &u, &spec.psi, tag, &[(k + 1, n)], &[], "E^1_{k+1..n}")?;
            if tag == FamilyTag::G0PsiZeta {
                zeta = scalar_map(&u, &spec.zeta, "zeta", tag)?;
                check_chain(zeta.iter().any(|z| !z.is_zero()), "zeta != 0")?;
            }
            for (i, (a, (z1, _))) in u.basis.iter().zip(&psi).enumerate() {
                let mut t = a.clone();
                t.z1 = z1.clone();
                if let Some(z) = zeta.get(i) {
                    t.c = z.clone();
                }
                gens.push(t);
            }
            gens.extend(st::n1_elems(n, 1, k));
            expected_dim = u.basis.len() + k;
            if tag == FamilyTag::G0Psi {
                gens.push(st::c_elem(n));
                expected_dim += 1;
            }
        }
        FamilyTag::G0Zeta => {
            if !span_contains(n, &st::sod_elems(n, 1, n), &u.alg) {
                return Err(constraint("h must be a subalgebra of sod(1..n)"));
            }
            check_chain(u.basis.len() > u.n1, "z(h) != 0")?;
            zeta = scalar_map(&u, &spec.zeta, "zeta", tag)?;
            check_chain(zeta[u.n1..].iter().any(|z| !z.is_zero()), "zeta restricted to z(h) is nonzero")?;
            for (a, z) in u.basis.iter().zip(&zeta) {
                let mut t = a.clone();
                t.c = z.clone();
                gens.push(t);
            }
            gens.extend(st::n1_elems(n, 1, n));
            expected_dim = u.basis.len() + n;
        }
        FamilyTag::G0A1Zeta => {
            if !span_contains(n, &st::sod_elems(n, 1, n), &u.alg) {
                return Err(constraint("h must be a subalgebra of sod(1..n)"));
            }
            let z = need(&spec.zeta_a1, "zeta_a1", tag)?.0;
            let mut t = st::a1_elem(n);
            t.c = z;
            gens.push(t);
            gens.extend(u.basis.iter().cloned());
            gens.extend(st::n1_elems(n, 1, n));
            expected_dim = u.basis.len() + n + 1;
        }
        _ => unreachable!("all tags handled"),
    }

    let algebra = LieAlgebra::from_spanning(d, &mats(n, &gens))?;
    if algebra.dim() != expected_dim {
        return Err(constraint(format!(
            "built algebra has dimension {} but the parameter count gives {expected_dim}",
            algebra.dim()
        )));
    }
    let n0 = trivial_block_start(n, &u.basis);
    let dim_u = u.basis.len();
    let fill = |v: Vec<Q>| if v.is_empty() { vec![Q::zero(); dim_u] } else { v };
    Ok(BuiltFamily {
        tag,
        spec: spec.clone(),
        n,
        algebra,
        u: u.alg,
        u_basis: u.basis,
        n1: u.n1,
        n0,
        varphi: fill(varphi),
        phi: fill(phi),
        psi: if psi.is_empty() { vec![(vec![Q::zero(); n], vec![Q::zero(); n]); dim_u] } else { psi },
        zeta: fill(zeta),
    })
}

/// Whether every element has zero complex trace, i.e. lies in `su(1, n+1)`.
///
/// For a matrix commuting with `J` the complex trace vanishes iff `tr(J M) = 0`.
pub fn is_special_su(g: &LieAlgebra) -> bool {
    let Some(n) = g.ambient_n() else { return false };
    let j = crate::ambient::complex_structure(n);
    g.inside_stabilizer() && g.basis().iter().all(|b| j.mul(b).trace().is_zero())
}

/// `pr_{u(n)}`: the `(B, C)` parts of the algebra, as a subspace of flattened matrices.
pub fn projection_to_un(g: &LieAlgebra) -> Option<Subspace> {
    let n = g.ambient_n()?;
    let d = 2 * n + 4;
    let tuples = g.seven_tuples()?;
    let proj: Vec<Vec<Q>> = tuples
        .iter()
        .map(|t| {
            let mut p = SevenTuple::zero(n);
            p.b = t.b.clone();
            p.c_sym = t.c_sym.clone();
            p.to_matrix(n).expect("sized").flatten()
        })
        .collect();
    Some(Subspace::from_spanning(d * d, proj))
}
