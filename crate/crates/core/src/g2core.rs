//! The split Lie algebra g2 in a Chevalley basis, its adjoint group
//! elements, the long-root SL3, and membership tests for P and K.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar};
use crate::numkernel::{int, Rational};

pub const DIM: usize = 14;
pub const H_ALPHA: usize = 12;
pub const H_BETA: usize = 13;

/// The root `m·α + n·β`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Root {
    pub m: i64,
    pub n: i64,
}

pub const ALPHA: Root = Root { m: 1, n: 0 };
pub const BETA: Root = Root { m: 0, n: 1 };
pub const ALPHA_BETA: Root = Root { m: 1, n: 1 };
pub const TWO_ALPHA_BETA: Root = Root { m: 2, n: 1 };
pub const THREE_ALPHA_BETA: Root = Root { m: 3, n: 1 };
pub const HIGHEST: Root = Root { m: 3, n: 2 };

pub const POSITIVE: [Root; 6] = [
    ALPHA,
    BETA,
    ALPHA_BETA,
    TWO_ALPHA_BETA,
    THREE_ALPHA_BETA,
    HIGHEST,
];

impl Root {
    pub fn new(m: i64, n: i64) -> Result<Root> {
        let r = Root { m, n };
        if r.is_root() {
            Ok(r)
        } else {
            Err(Error::Domain(format!("({m},{n}) is not a root of G2")))
        }
    }

    pub fn is_root(self) -> bool {
        POSITIVE.contains(&self) || POSITIVE.contains(&-self)
    }

    pub fn is_positive(self) -> bool {
        POSITIVE.contains(&self)
    }

    pub fn is_long(self) -> bool {
        self.norm_sq() == 6
    }

    pub fn norm_sq(self) -> i64 {
        inner(self, self)
    }

    /// Position of `X_γ` in the basis.
    pub fn index(self) -> usize {
        if let Some(i) = POSITIVE.iter().position(|&r| r == self) {
            i
        } else if let Some(i) = POSITIVE.iter().position(|&r| r == -self) {
            6 + i
        } else {
            panic!("{self} is not a root")
        }
    }

    pub fn from_index(i: usize) -> Option<Root> {
        match i {
            0..=5 => Some(POSITIVE[i]),
            6..=11 => Some(-POSITIVE[i - 6]),
            _ => None,
        }
    }

    /// Coefficients of the coroot on `(α∨, β∨)`.
    pub fn coroot(self) -> (i64, i64) {
        let ns = self.norm_sq();
        (2 * self.m / ns, 6 * self.n / ns)
    }

    /// Exponents `(e1, e2)` with `γ = e1·ε1 + e2·ε2`, so `diag(t1,t2,t3)` acts by `t1^e1·t2^e2`.
    pub fn eps_coords(self) -> (i64, i64) {
        (self.n, self.m - self.n)
    }
}

impl std::ops::Neg for Root {
    type Output = Root;
    fn neg(self) -> Root {
        Root {
            m: -self.m,
            n: -self.n,
        }
    }
}

impl std::ops::Add for Root {
    type Output = Root;
    fn add(self, o: Root) -> Root {
        Root {
            m: self.m + o.m,
            n: self.n + o.n,
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.m < 0 || self.n < 0 { "-" } else { "" };
        let (m, n) = (self.m.abs(), self.n.abs());
        let mut s = String::new();
        match m {
            0 => {}
            1 => s.push('a'),
            _ => s.push_str(&format!("{m}a")),
        }
        if n > 0 {
            if !s.is_empty() {
                s.push('+');
            }
            if n > 1 {
                s.push_str(&n.to_string());
            }
            s.push('b');
        }
        if sign.is_empty() || m + n == 1 {
            write!(f, "{sign}{s}")
        } else {
            write!(f, "-({s})")
        }
    }
}

/// Invariant form on the root lattice with `(α,α) = 2`, `(β,β) = 6`.
pub fn inner(a: Root, b: Root) -> i64 {
    2 * a.m * b.m + 6 * a.n * b.n - 3 * (a.m * b.n + a.n * b.m)
}

/// `⟨γ, δ∨⟩`.
pub fn pairing(gamma: Root, delta: Root) -> i64 {
    2 * inner(gamma, delta) / inner(delta, delta)
}

pub fn roots() -> Vec<Root> {
    POSITIVE.iter().copied().chain(POSITIVE.iter().map(|&r| -r)).collect()
}

pub fn reflect(gamma: Root, simple: Root) -> Result<Root> {
    if simple != ALPHA && simple != BETA {
        return Err(Error::Domain(format!("{simple} is not a simple root")));
    }
    let k = pairing(gamma, simple);
    Ok(Root {
        m: gamma.m - k * simple.m,
        n: gamma.n - k * simple.n,
    })
}

pub fn label(i: usize) -> String {
    match i {
        H_ALPHA => "H_a".into(),
        H_BETA => "H_b".into(),
        _ => format!("X[{}]", Root::from_index(i).unwrap()),
    }
}

/// Sparse bracket result: `[e_i, e_j] = Σ c_k e_k`.
type Bracket = Vec<(usize, Rational)>;

#[derive(Clone, Debug)]
pub struct ChevalleyBasis {
    table: Vec<Vec<Bracket>>,
    ad: Vec<Matrix<Rational>>,
    /// `N_{γδ}` for every ordered pair of roots whose sum is a root.
    structure: HashMap<(Root, Root), i64>,
    pair_signs: [i64; 5],
    flips: [i64; 12],
}

/// Resolved sign data: provisional positive-pair signs, then root-vector flips.
#[derive(Clone, Debug, Serialize)]
pub struct SignTable {
    pub positive_pairs: Vec<(Root, Root, i64)>,
    pub flipped_roots: Vec<Root>,
    pub structure_constants: Vec<(Root, Root, i64)>,
}

/// Root string bound: `|N_{γδ}| = p + 1` with `p` maximal such that `δ − pγ` is a root.
fn string_length(gamma: Root, delta: Root) -> i64 {
    let shifted = |k: i64| Root {
        m: delta.m - k * gamma.m,
        n: delta.n - k * gamma.n,
    };
    let mut p = 0;
    while shifted(p + 1).is_root() {
        p += 1;
    }
    p + 1
}

const SIGNED_PAIRS: [(Root, Root); 5] = [
    (ALPHA, BETA),
    (ALPHA, ALPHA_BETA),
    (ALPHA, TWO_ALPHA_BETA),
    (BETA, THREE_ALPHA_BETA),
    (ALPHA_BETA, TWO_ALPHA_BETA),
];

fn positive_constant(signs: &[i64; 5], x: Root, y: Root) -> i64 {
    for (k, &(a, b)) in SIGNED_PAIRS.iter().enumerate() {
        if (a, b) == (x, y) {
            return signs[k] * string_length(a, b);
        }
        if (a, b) == (y, x) {
            return -signs[k] * string_length(a, b);
        }
    }
    unreachable!("{x} + {y} is not a positive root sum")
}

/// `N_{xy}` from the five positive-pair signs via the cyclic rule
/// `N_{ab}/(c,c) = N_{bc}/(a,a) = N_{ca}/(b,b)` for `a+b+c = 0`.
fn constant(signs: &[i64; 5], x: Root, y: Root) -> i64 {
    if x.is_positive() && y.is_positive() {
        return positive_constant(signs, x, y);
    }
    if !x.is_positive() && !y.is_positive() {
        return -constant(signs, -x, -y);
    }
    let z = -(x + y);
    let positives = [x, y, z].iter().filter(|r| r.is_positive()).count();
    if positives == 1 {
        return -constant(signs, -x, -y);
    }
    let cyc = [(x, y, z), (y, z, x), (z, x, y)];
    let &(a, b, c) = cyc
        .iter()
        .find(|(a, b, _)| a.is_positive() && b.is_positive())
        .unwrap();
    let known = positive_constant(signs, a, b);
    // N_{xy}/(z,z) equals N_{ab}/(c,c)
    known * z.norm_sq() / c.norm_sq()
}

type Structure = HashMap<(Root, Root), i64>;

fn build_table(signs: &[i64; 5], flips: &[i64; 12]) -> (Vec<Vec<Bracket>>, Structure) {
    let mut table = vec![vec![Bracket::new(); DIM]; DIM];
    let mut structure = HashMap::new();
    let all = roots();
    let sigma = |r: Root| flips[r.index()];
    for &x in &all {
        for &y in &all {
            let (i, j) = (x.index(), y.index());
            if x == -y {
                let (ca, cb) = x.coroot();
                let s = sigma(x) * sigma(y);
                let mut v = Bracket::new();
                if ca != 0 {
                    v.push((H_ALPHA, int(s * ca)));
                }
                if cb != 0 {
                    v.push((H_BETA, int(s * cb)));
                }
                table[i][j] = v;
            } else if (x + y).is_root() {
                let n = constant(signs, x, y);
                structure.insert((x, y), n * sigma(x) * sigma(y) * sigma(x + y));
                table[i][j] = vec![((x + y).index(), int(n * sigma(x) * sigma(y) * sigma(x + y)))];
            }
        }
        for (h, simple) in [(H_ALPHA, ALPHA), (H_BETA, BETA)] {
            let k = pairing(x, simple);
            if k != 0 {
                table[h][x.index()] = vec![(x.index(), int(k))];
                table[x.index()][h] = vec![(x.index(), int(-k))];
            }
        }
    }
    (table, structure)
}

fn ad_matrices(table: &[Vec<Bracket>]) -> Vec<Matrix<Rational>> {
    (0..DIM)
        .map(|i| {
            let mut m = Matrix::zeros(DIM, DIM);
            for j in 0..DIM {
                for (k, c) in &table[i][j] {
                    m[(*k, j)] = c.clone();
                }
            }
            m
        })
        .collect()
}

/// One adjoint-action equality or root-vector recipe entry: `Ad(w) X_from = sign·X_to`.
#[derive(Clone, Debug, Serialize)]
pub struct WeylIdentity {
    pub weyl: &'static str,
    pub from: Root,
    pub to: Root,
    pub sign: i64,
}

fn weyl_identity(weyl: &'static str, from: Root, to: Root, sign: i64) -> WeylIdentity {
    WeylIdentity {
        weyl,
        from,
        to,
        sign,
    }
}

/// The six adjoint-action equalities.
pub fn adjoint_action_identities() -> Vec<WeylIdentity> {
    vec![
        weyl_identity("w_a", TWO_ALPHA_BETA, ALPHA_BETA, -1),
        weyl_identity("w_a", THREE_ALPHA_BETA, BETA, 1),
        weyl_identity("w_a", HIGHEST, HIGHEST, 1),
        weyl_identity("w_b", ALPHA_BETA, ALPHA, -1),
        weyl_identity("w_b", TWO_ALPHA_BETA, TWO_ALPHA_BETA, 1),
        weyl_identity("w_b", HIGHEST, THREE_ALPHA_BETA, -1),
    ]
}

/// Defining recipe for the non-simple root vectors, positive and negative.
pub fn root_vector_recipe() -> Vec<WeylIdentity> {
    let mut out = Vec::new();
    for sign in [1, -1] {
        let r = |x: Root| Root {
            m: sign * x.m,
            n: sign * x.n,
        };
        out.push(weyl_identity("w_b", r(ALPHA), r(ALPHA_BETA), 1));
        out.push(weyl_identity("w_a", r(ALPHA_BETA), r(TWO_ALPHA_BETA), 1));
        out.push(weyl_identity("w_a", r(BETA), r(THREE_ALPHA_BETA), -1));
        out.push(weyl_identity("w_b", r(THREE_ALPHA_BETA), r(HIGHEST), 1));
    }
    out
}

fn check_identity(id: &WeylIdentity, w_a: &Matrix<Rational>, w_b: &Matrix<Rational>) -> bool {
    let w = if id.weyl == "w_a" { w_a } else { w_b };
    let col = w.column(id.from.index());
    let target = id.to.index();
    col.iter().enumerate().all(|(k, c)| {
        if k == target {
            *c == int(id.sign)
        } else {
            c.is_zero()
        }
    })
}

fn exp_nilpotent<T: Scalar>(ad: &Matrix<T>, t: &T) -> Matrix<T> {
    let mut result = Matrix::identity(DIM);
    let mut term = Matrix::identity(DIM);
    for k in 1..=DIM {
        term = (&term * ad).scale(&(t.clone() / T::from_rational(&int(k as i64))));
        if is_zero_matrix(&term) {
            break;
        }
        result = &result + &term;
    }
    result
}

fn is_zero_matrix<T: Scalar>(m: &Matrix<T>) -> bool {
    (0..m.rows()).all(|i| m.row(i).iter().all(Zero::is_zero))
}

impl ChevalleyBasis {
    fn with_signs(signs: &[i64; 5], flips: &[i64; 12]) -> Self {
        let (table, structure) = build_table(signs, flips);
        let ad = ad_matrices(&table);
        ChevalleyBasis {
            table,
            ad,
            structure,
            pair_signs: *signs,
            flips: *flips,
        }
    }

    pub fn sign_table(&self) -> SignTable {
        let mut structure_constants: Vec<(Root, Root, i64)> = POSITIVE
            .iter()
            .flat_map(|&x| POSITIVE.iter().map(move |&y| (x, y)))
            .filter(|&(x, y)| x < y)
            .filter_map(|(x, y)| {
                let n = self.structure_constant(x, y);
                (n != 0).then_some((x, y, n))
            })
            .collect();
        structure_constants.sort();
        SignTable {
            positive_pairs: SIGNED_PAIRS
                .iter()
                .zip(self.pair_signs)
                .map(|(&(a, b), s)| (a, b, s))
                .collect(),
            flipped_roots: roots().into_iter().filter(|r| self.flips[r.index()] < 0).collect(),
            structure_constants,
        }
    }

    pub fn bracket(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.table[i][j]
    }

    pub fn bracket_vectors(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); DIM];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for (k, c) in &self.table[i][j] {
                    out[*k] += a * b * c;
                }
            }
        }
        out
    }

    /// `N_{γδ}`, zero when `γ + δ` is not a root.
    pub fn structure_constant(&self, gamma: Root, delta: Root) -> i64 {
        self.structure.get(&(gamma, delta)).copied().unwrap_or(0)
    }

    pub fn ad(&self, i: usize) -> &Matrix<Rational> {
        &self.ad[i]
    }

    pub fn killing(&self, i: usize, j: usize) -> Rational {
        let p = &self.ad[i] * &self.ad[j];
        (0..DIM).map(|k| p[(k, k)].clone()).sum()
    }

    /// Exact Jacobi sums that fail to vanish.
    pub fn jacobi_violations(&self) -> Vec<(usize, usize, usize)> {
        let unit = |i: usize| {
            let mut v = vec![Rational::zero(); DIM];
            v[i] = Rational::one();
            v
        };
        let mut bad = Vec::new();
        for i in 0..DIM {
            for j in 0..DIM {
                let xy = self.bracket_vectors(&unit(i), &unit(j));
                for k in 0..DIM {
                    let yz = self.bracket_vectors(&unit(j), &unit(k));
                    let zx = self.bracket_vectors(&unit(k), &unit(i));
                    let a = self.bracket_vectors(&xy, &unit(k));
                    let b = self.bracket_vectors(&yz, &unit(i));
                    let c = self.bracket_vectors(&zx, &unit(j));
                    if (0..DIM).any(|t| !(a[t].clone() + &b[t] + &c[t]).is_zero()) {
                        bad.push((i, j, k));
                    }
                }
            }
        }
        bad
    }
}

pub fn build_chevalley_basis() -> Result<ChevalleyBasis> {
    let mut provisional = None;
    for code in 0..32u32 {
        let signs: [i64; 5] = std::array::from_fn(|k| if code >> k & 1 == 0 { 1 } else { -1 });
        let b = ChevalleyBasis::with_signs(&signs, &[1; 12]);
        if b.jacobi_violations().is_empty() {
            provisional = Some(signs);
            break;
        }
    }
    let signs = provisional
        .ok_or_else(|| Error::Construction("no sign choice satisfies the Jacobi identity".into()))?;

    let identities = adjoint_action_identities();
    let recipe = root_vector_recipe();
    let mut first_failure: Option<WeylIdentity> = None;
    for code in 0..64u32 {
        let mut flips = [1i64; 12];
        for k in 0..6 {
            if code >> k & 1 == 1 {
                flips[k] = -1;
                flips[k + 6] = -1;
            }
        }
        let b = ChevalleyBasis::with_signs(&signs, &flips);
        let w_a = b.weyl_matrix(ALPHA);
        let w_b = b.weyl_matrix(BETA);
        match identities
            .iter()
            .chain(recipe.iter())
            .find(|id| !check_identity(id, &w_a, &w_b))
        {
            None => return Ok(b),
            Some(id) => {
                if first_failure.is_none() {
                    first_failure = Some(id.clone());
                }
            }
        }
    }
    let id = first_failure.unwrap();
    Err(Error::Construction(format!(
        "sign search exhausted; Ad({})X[{}] = {}X[{}] never holds",
        id.weyl, id.from, id.sign, id.to
    )))
}

/// The shared basis, built on first use.
pub fn basis() -> &'static ChevalleyBasis {
    static BASIS: OnceLock<ChevalleyBasis> = OnceLock::new();
    BASIS.get_or_init(|| build_chevalley_basis().expect("Chevalley basis construction"))
}

impl ChevalleyBasis {
    fn one_param_matrix<T: Scalar>(&self, gamma: Root, t: &T) -> Matrix<T> {
        let ad = self.ad[gamma.index()].map(T::from_rational);
        exp_nilpotent(&ad, t)
    }

    fn weyl_matrix(&self, gamma: Root) -> Matrix<Rational> {
        let one = Rational::one();
        let a = self.one_param_matrix(gamma, &one);
        let b = self.one_param_matrix(-gamma, &-one.clone());
        &(&a * &b) * &a
    }
}

/// A group element acting on g2 by its adjoint matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointElement<T> {
    matrix: Matrix<T>,
}

pub type ExactElement = AdjointElement<Rational>;
pub type RealElement = AdjointElement<f64>;

impl<T: Scalar> AdjointElement<T> {
    pub fn identity() -> Self {
        AdjointElement {
            matrix: Matrix::identity(DIM),
        }
    }

    pub fn from_matrix(matrix: Matrix<T>) -> Result<Self> {
        if matrix.rows() != DIM || matrix.cols() != DIM {
            return Err(Error::Domain("adjoint matrices are 14x14".into()));
        }
        Ok(AdjointElement { matrix })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn mul(&self, other: &Self) -> Self {
        AdjointElement {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(AdjointElement {
            matrix: self.matrix.inverse()?,
        })
    }

    pub fn determinant(&self) -> T {
        self.matrix.determinant()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    /// `Ad(g) X` for a coordinate vector `X`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.matrix.mul_vec(x)
    }

    pub fn product<'a>(items: impl IntoIterator<Item = &'a Self>) -> Self
    where
        T: 'a,
    {
        items
            .into_iter()
            .fold(Self::identity(), |acc, g| acc.mul(g))
    }
}

impl ExactElement {
    pub fn to_real(&self) -> RealElement {
        AdjointElement {
            matrix: self.matrix.map(f64::from_rational),
        }
    }
}

/// `x_γ(t) = exp(t·ad X_γ)`.
pub fn one_param<T: Scalar>(gamma: Root, t: T) -> AdjointElement<T> {
    AdjointElement {
        matrix: basis().one_param_matrix(gamma, &t),
    }
}

/// `w_γ = x_γ(1)·x_{−γ}(−1)·x_γ(1)` for a simple root `γ`.
pub fn weyl_rep<T: Scalar>(gamma: Root) -> Result<AdjointElement<T>> {
    if gamma != ALPHA && gamma != BETA {
        return Err(Error::Domain(format!("{gamma} is not a simple root")));
    }
    let a = one_param(gamma, T::one());
    let b = one_param(-gamma, -T::one());
    Ok(AdjointElement::product([&a, &b, &a]))
}

/// Torus element of the long-root SL3 for `diag(t1, t2, 1/(t1·t2))`.
pub fn torus<T: Scalar>(t1: T, t2: T) -> AdjointElement<T> {
    let mut m = Matrix::identity(DIM);
    for r in roots() {
        let (e1, e2) = r.eps_coords();
        m[(r.index(), r.index())] = int_pow(&t1, e1) * int_pow(&t2, e2);
    }
    AdjointElement { matrix: m }
}

fn int_pow<T: Scalar>(x: &T, e: i64) -> T {
    let base = if e < 0 { T::one() / x.clone() } else { x.clone() };
    (0..e.abs()).fold(T::one(), |acc, _| acc * base.clone())
}

/// Commutator right-hand side for `(x_γ(s), x_δ(t))`, or `None` when the
/// pair is required to commute.
pub fn commutator_rule(gamma: Root, delta: Root, s: &Rational, t: &Rational) -> Option<Vec<(Root, Rational)>> {
    let st = s * t;
    match (gamma, delta) {
        (BETA, ALPHA) => Some(vec![
            (ALPHA_BETA, st.clone()),
            (TWO_ALPHA_BETA, &st * t),
            (THREE_ALPHA_BETA, &st * t * t),
            (HIGHEST, &st * s * t * t),
        ]),
        (ALPHA_BETA, ALPHA) => Some(vec![
            (TWO_ALPHA_BETA, int(2) * &st),
            (THREE_ALPHA_BETA, int(3) * &st * t),
            (HIGHEST, int(3) * &st * s),
        ]),
        (TWO_ALPHA_BETA, ALPHA) => Some(vec![(THREE_ALPHA_BETA, int(3) * &st)]),
        (THREE_ALPHA_BETA, BETA) => Some(vec![(HIGHEST, -st)]),
        (TWO_ALPHA_BETA, ALPHA_BETA) => Some(vec![(HIGHEST, int(3) * &st)]),
        _ => None,
    }
}

/// Pairs listed with a nontrivial commutator.
pub const LISTED_PAIRS: [(Root, Root); 5] = [
    (BETA, ALPHA),
    (ALPHA_BETA, ALPHA),
    (TWO_ALPHA_BETA, ALPHA),
    (THREE_ALPHA_BETA, BETA),
    (TWO_ALPHA_BETA, ALPHA_BETA),
];

/// `(x_γ(s), x_δ(t))·[claimed right side]^{-1}` with `(x,y) = x⁻¹y⁻¹xy`.
pub fn commutator_residual(gamma: Root, delta: Root, s: &Rational, t: &Rational) -> Result<ExactElement> {
    if !gamma.is_positive() || !delta.is_positive() {
        return Err(Error::Domain("commutator rules are stated for positive roots".into()));
    }
    let comm = AdjointElement::product([
        &one_param(gamma, -s.clone()),
        &one_param(delta, -t.clone()),
        &one_param(gamma, s.clone()),
        &one_param(delta, t.clone()),
    ]);
    let factors = commutator_rule(gamma, delta, s, t).unwrap_or_default();
    let inverse_rhs: Vec<ExactElement> = factors
        .iter()
        .rev()
        .map(|(r, c)| one_param(*r, -c.clone()))
        .collect();
    Ok(comm.mul(&AdjointElement::product(inverse_rhs.iter())))
}

/// Status of one Weyl-action identity in the resolved basis.
pub fn weyl_identity_holds(id: &WeylIdentity) -> bool {
    let w_a = basis().weyl_matrix(ALPHA);
    let w_b = basis().weyl_matrix(BETA);
    check_identity(id, &w_a, &w_b)
}

/// The Gram form `⟨X, Y⟩ = −B(X, ωY)`.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub g: Matrix<Rational>,
    pub inverse: Matrix<Rational>,
}

fn chevalley_involution_index(j: usize) -> (usize, Rational) {
    match Root::from_index(j) {
        Some(r) => ((-r).index(), -Rational::one()),
        None => (j, -Rational::one()),
    }
}

fn build_gram() -> GramMatrix {
    let b = basis();
    let mut g = Matrix::zeros(DIM, DIM);
    for i in 0..DIM {
        for j in 0..DIM {
            let (k, c) = chevalley_involution_index(j);
            g[(i, j)] = -(c * b.killing(i, k));
        }
    }
    let inverse = g.inverse().expect("Gram matrix is invertible");
    GramMatrix { g, inverse }
}

pub fn gram() -> &'static GramMatrix {
    static GRAM: OnceLock<GramMatrix> = OnceLock::new();
    GRAM.get_or_init(build_gram)
}

impl GramMatrix {
    pub fn leading_minors(&self) -> Vec<Rational> {
        (1..=DIM)
            .map(|k| {
                let mut m = Matrix::zeros(k, k);
                for i in 0..k {
                    for j in 0..k {
                        m[(i, j)] = self.g[(i, j)].clone();
                    }
                }
                m.determinant()
            })
            .collect()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.g == self.g.transpose() && self.leading_minors().iter().all(|d| *d > Rational::zero())
    }
}

/// `gᵀ·G·g = G`, exactly for rationals and to relative `tol` otherwise.
pub fn is_in_k<T: Scalar>(g: &AdjointElement<T>, tol: f64) -> bool {
    let gm = gram().g.map(T::from_rational);
    let lhs = &(&g.matrix.transpose() * &gm) * &g.matrix;
    if T::EXACT {
        lhs == gm
    } else {
        lhs.max_abs_diff(&gm) <= tol * gm.max_abs()
    }
}

/// Stabilizer of the highest-root line.
pub fn in_parabolic_p(g: &ExactElement) -> bool {
    let col = g.matrix.column(HIGHEST.index());
    col.iter()
        .enumerate()
        .all(|(k, c)| k == HIGHEST.index() || c.is_zero())
}

/// Root assignment of the SL3 elementary matrices `E_ij` (0-based).
fn sl3_root(i: usize, j: usize) -> Root {
    match (i, j) {
        (0, 1) => BETA,
        (1, 2) => THREE_ALPHA_BETA,
        (0, 2) => HIGHEST,
        (1, 0) => -BETA,
        (2, 1) => -THREE_ALPHA_BETA,
        (2, 0) => -HIGHEST,
        _ => unreachable!(),
    }
}

/// Signs `ε` with `E_ij ↦ ε·X_root`, frozen on first use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingSigns {
    pub e12: i64,
    pub e23: i64,
    pub e13: i64,
}

impl EmbeddingSigns {
    fn of(&self, i: usize, j: usize) -> i64 {
        match (i.min(j), i.max(j)) {
            (0, 1) => self.e12,
            (1, 2) => self.e23,
            _ => self.e13,
        }
    }
}

fn sl3_image(signs: &EmbeddingSigns, x: &Matrix<Rational>) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); DIM];
    for i in 0..3 {
        for j in 0..3 {
            if i != j && !x[(i, j)].is_zero() {
                v[sl3_root(i, j).index()] += int(signs.of(i, j)) * &x[(i, j)];
            }
        }
    }
    // diag(d1, d2, d3) = d1·(E11−E22) + (d1+d2)·(E22−E33); E22−E33 ↦ H_{3α+β} = H_α + H_β
    let d1 = x[(0, 0)].clone();
    let d12 = &d1 + &x[(1, 1)];
    v[H_BETA] += &d1 + &d12;
    v[H_ALPHA] += d12;
    v
}

/// All sign choices making the Lie algebra map a homomorphism.
pub fn homomorphic_embedding_signs() -> Vec<EmbeddingSigns> {
    let b = basis();
    let elementary = |i: usize, j: usize| {
        let mut m = Matrix::zeros(3, 3);
        m[(i, j)] = Rational::one();
        m
    };
    let mut gens: Vec<Matrix<Rational>> = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                gens.push(elementary(i, j));
            }
        }
    }
    gens.push(&elementary(0, 0) - &elementary(1, 1));
    gens.push(&elementary(1, 1) - &elementary(2, 2));
    let mut out = Vec::new();
    for code in 0..8u32 {
        let s = |k: u32| if code >> k & 1 == 0 { 1 } else { -1 };
        let signs = EmbeddingSigns {
            e12: s(0),
            e23: s(1),
            e13: s(2),
        };
        let ok = gens.iter().all(|x| {
            gens.iter().all(|y| {
                let xy = &(x * y) - &(y * x);
                b.bracket_vectors(&sl3_image(&signs, x), &sl3_image(&signs, y)) == sl3_image(&signs, &xy)
            })
        });
        if ok {
            out.push(signs);
        }
    }
    out
}

pub fn embedding_signs() -> EmbeddingSigns {
    static SIGNS: OnceLock<EmbeddingSigns> = OnceLock::new();
    *SIGNS.get_or_init(|| crate::iwasawa::resolve_embedding_signs().expect("embedding sign resolution"))
}

/// `I + c·E_ij` in the long-root SL3.
pub fn embed_elementary<T: Scalar>(signs: &EmbeddingSigns, i: usize, j: usize, c: T) -> AdjointElement<T> {
    let eps = T::from_rational(&int(signs.of(i, j)));
    one_param(sl3_root(i, j), eps * c)
}

pub fn embed_sl3<T: Scalar>(g: &Matrix<T>) -> Result<AdjointElement<T>> {
    embed_sl3_with(&embedding_signs(), g)
}

/// Row-reduction factorization `g = T⁻¹·L·D·U` mapped generator by generator.
pub fn embed_sl3_with<T: Scalar>(signs: &EmbeddingSigns, g: &Matrix<T>) -> Result<AdjointElement<T>> {
    if g.rows() != 3 || g.cols() != 3 {
        return Err(Error::Domain("expected a 3x3 matrix".into()));
    }
    let det = g.determinant();
    let det_ok = if T::EXACT {
        det.is_one()
    } else {
        (det.clone() - T::one()).magnitude() <= 1e-12 * g.max_abs().powi(3).max(1.0)
    };
    if !det_ok {
        return Err(Error::Domain(format!("determinant {det:?} is not 1")));
    }
    let grid = [0i64, 1, -1, 2, -2];
    let mut best: Option<(f64, Matrix<T>)> = None;
    'search: for &a in &grid {
        for &b in &grid {
            for &c in &grid {
                let mut t = Matrix::<T>::identity(3);
                t[(0, 1)] = T::from_rational(&int(a));
                t[(0, 2)] = T::from_rational(&int(b));
                t[(1, 2)] = T::from_rational(&int(c));
                let m = &t * g;
                let m1 = m[(0, 0)].clone();
                let m2 = m[(0, 0)].clone() * m[(1, 1)].clone() - m[(0, 1)].clone() * m[(1, 0)].clone();
                if m1.is_zero() || m2.is_zero() {
                    continue;
                }
                let score = m1.magnitude().min(m2.magnitude());
                if best.as_ref().is_none_or(|(s, _)| score > *s) {
                    best = Some((score, t));
                }
                if T::EXACT || score > 0.25 {
                    break 'search;
                }
            }
        }
    }
    let (_, t) = best.ok_or_else(|| Error::Domain("no row-reduction path found".into()))?;
    let m = &t * g;
    let (l, d, u) = ldu(&m);
    let t_inv = t.inverse()?;
    let parts = [
        embed_upper(signs, &t_inv),
        embed_lower(signs, &l),
        torus(d[0].clone(), d[1].clone()),
        embed_upper(signs, &u),
    ];
    Ok(AdjointElement::product(parts.iter()))
}

fn ldu<T: Scalar>(m: &Matrix<T>) -> (Matrix<T>, [T; 3], Matrix<T>) {
    let mut a = m.clone();
    let mut l = Matrix::<T>::identity(3);
    for k in 0..3 {
        for i in k + 1..3 {
            let f = a[(i, k)].clone() / a[(k, k)].clone();
            l[(i, k)] = f.clone();
            for j in 0..3 {
                a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
            }
        }
    }
    let d = [a[(0, 0)].clone(), a[(1, 1)].clone(), a[(2, 2)].clone()];
    let mut u = Matrix::<T>::identity(3);
    for i in 0..3 {
        for j in i + 1..3 {
            u[(i, j)] = a[(i, j)].clone() / d[i].clone();
        }
    }
    (l, d, u)
}

/// Upper unipotent `U = E23(u23)·E12(u12)·E13(u13)`.
fn embed_upper<T: Scalar>(signs: &EmbeddingSigns, u: &Matrix<T>) -> AdjointElement<T> {
    AdjointElement::product(
        [
            embed_elementary(signs, 1, 2, u[(1, 2)].clone()),
            embed_elementary(signs, 0, 1, u[(0, 1)].clone()),
            embed_elementary(signs, 0, 2, u[(0, 2)].clone()),
        ]
        .iter(),
    )
}

/// Lower unipotent `L = E21(l21)·E31(l31)·E32(l32)`.
fn embed_lower<T: Scalar>(signs: &EmbeddingSigns, l: &Matrix<T>) -> AdjointElement<T> {
    AdjointElement::product(
        [
            embed_elementary(signs, 1, 0, l[(1, 0)].clone()),
            embed_elementary(signs, 2, 0, l[(2, 0)].clone()),
            embed_elementary(signs, 2, 1, l[(2, 1)].clone()),
        ]
        .iter(),
    )
}

/// `γ = x_{−(α+β)}(−1)·w_β`.
pub fn gamma_element<T: Scalar>() -> AdjointElement<T> {
    one_param(-ALPHA_BETA, -T::one()).mul(&weyl_rep(BETA).unwrap())
}
