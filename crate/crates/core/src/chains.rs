//! Seeded simulation of the random walks driven by i.i.d. uniform generators
//! `M_k ∈ {E_0, …, E_8}`:
//!
//! * `X_n = h_{M_n} ∘ ⋯ ∘ h_{M_1}(x)` and `Y_n = h_{M_1} ∘ ⋯ ∘ h_{M_n}(x)` on `ℝ ∪ {∞}`,
//! * `Z_n`, `V_n`, the same compositions acting on the upper half plane,
//! * `W_{n+1} = H_{I_{n+1}}(W_n)` on `[0, 1]`, the projection of `X` by `C`,
//! * `U_{n+1} = 1/(K_{n+1} + U_n)` with geometric `K`,
//!
//! plus direct samplers for the stationary laws of `W`, `Y = W^{±1}` and `X`.
//!
//! Trajectory `j` of a run with seed `s` draws from ChaCha20 stream `j` of key
//! `s`, so results do not depend on how trajectories are scheduled.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::cfrac::{ContinuedFraction, ExtendedRational};
use crate::error::{Error, Result};
use crate::psl2z::{FloatPoint, GeneratorIndex, ProjectiveMatrix, UpperHalfPoint};

/// Pole guard for floating-point boundary chains.
pub const POLE_GUARD: f64 = 1e-12;

/// Default truncation depth of stationary samplers.
pub const DEFAULT_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WalkConfig {
    pub seed: u64,
    pub steps: usize,
    pub trajectories: usize,
    pub mode: Mode,
}

impl WalkConfig {
    pub fn new(seed: u64, steps: usize, trajectories: usize, mode: Mode) -> Self {
        Self {
            seed,
            steps,
            trajectories,
            mode,
        }
    }

    pub fn rng(&self, trajectory: usize) -> ChaCha20Rng {
        trajectory_rng(self.seed, trajectory)
    }
}

pub fn trajectory_rng(seed: u64, trajectory: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trajectory as u64);
    rng
}

pub fn draw_generator<R: RngCore>(rng: &mut R) -> GeneratorIndex {
    GeneratorIndex::from_word(rng.next_u64())
}

/// `K` with `Pr(K = n) = 2^{−n}`: one plus the number of trailing zero bits.
pub fn draw_geometric<R: RngCore>(rng: &mut R) -> u64 {
    let mut k = 1;
    loop {
        let word = rng.next_u64();
        if word != 0 {
            return k + u64::from(word.trailing_zeros());
        }
        k += 64;
    }
}

pub fn draw_word<R: RngCore>(rng: &mut R, steps: usize) -> Vec<GeneratorIndex> {
    (0..steps).map(|_| draw_generator(rng)).collect()
}

/// Index `i ∈ 0..=4` of the interval map `H_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalMapIndex(u8);

impl IntervalMapIndex {
    pub const COUNT: usize = 5;

    pub fn new(i: usize) -> Result<Self> {
        if i < Self::COUNT {
            Ok(Self(i as u8))
        } else {
            Err(Error::IntervalMapOutOfRange(i))
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..Self::COUNT as u8).map(Self)
    }

    /// `ρ(i)` in ninths: 1 for `H_0`, 2 for each other map.
    pub fn weight_ninths(self) -> u32 {
        if self.0 == 0 {
            1
        } else {
            2
        }
    }
}

/// `H_0 = id`, `H_1 = 1/(1+x)`, `H_2 = 1−x`, `H_3 = min(x/(1−x), (1−x)/x)`,
/// `H_4 = x/(1+x)`, on `[0, 1]`.
pub fn interval_map(i: IntervalMapIndex, w: &ExtendedRational) -> Result<ExtendedRational> {
    w.check_unit_interval("interval map argument")?;
    Ok(interval_map_unchecked(i, w))
}

fn interval_map_unchecked(i: IntervalMapIndex, w: &ExtendedRational) -> ExtendedRational {
    match i.0 {
        0 => w.clone(),
        1 => w.unimodular_map_i64(0, 1, 1, 1),
        2 => w.unimodular_map_i64(-1, 1, 0, 1),
        3 => {
            // w ≤ 1/2 ⇔ 2 num ≤ den
            if w.numer() * 2 <= *w.denom() {
                w.unimodular_map_i64(1, 0, -1, 1)
            } else {
                w.unimodular_map_i64(-1, 1, 1, 0)
            }
        }
        _ => w.unimodular_map_i64(1, 0, 1, 1),
    }
}

pub fn interval_map_f64(i: IntervalMapIndex, w: f64) -> f64 {
    match i.0 {
        0 => w,
        1 => 1.0 / (1.0 + w),
        2 => 1.0 - w,
        3 => {
            if w <= 0.5 {
                w / (1.0 - w)
            } else {
                (1.0 - w) / w
            }
        }
        _ => w / (1.0 + w),
    }
}

/// Interval map tracking a generator under `C`: `E_0 ↦ H_0`, `E_i ↦ H_i` for
/// `i ≤ 4`, and `E_7, E_8, E_6, E_5 ↦ H_1, H_2, H_3, H_4`.
pub fn classify_generator(i: GeneratorIndex) -> IntervalMapIndex {
    const CLASS: [u8; 9] = [0, 1, 2, 3, 4, 4, 3, 1, 2];
    IntervalMapIndex(CLASS[i.get()])
}

/// Pairing under `x ↦ −x`: `h_i(−x) = −h_ν(i)(x)`.
pub fn negation_partner(i: GeneratorIndex) -> GeneratorIndex {
    const NU: [usize; 9] = [0, 2, 1, 4, 3, 6, 5, 8, 7];
    GeneratorIndex::new(NU[i.get()]).unwrap()
}

/// Pairing under `x ↦ −1/x`: `h_i(−1/x) = h_φ(i)(x)` for `i ≠ 0`, and
/// `h_0(−1/x) = x`.
pub fn inversion_partner(i: GeneratorIndex) -> GeneratorIndex {
    const PHI: [usize; 9] = [0, 3, 4, 1, 2, 8, 7, 6, 5];
    GeneratorIndex::new(PHI[i.get()]).unwrap()
}

/// `C(x) = min(|x|, 1/|x|)`, with `C(0) = C(∞) = 0`.
pub fn project_c(x: &ExtendedRational) -> ExtendedRational {
    if x.is_infinite() {
        return ExtendedRational::zero();
    }
    let a = x.abs();
    if a <= ExtendedRational::one() {
        a
    } else {
        a.recip()
    }
}

pub fn project_c_f64(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        a
    } else {
        1.0 / a
    }
}

/// The four-element group generated by `x ↦ −x` and `x ↦ −1/x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GammaElement {
    Identity,
    Negate,
    NegRecip,
    Recip,
}

impl GammaElement {
    pub fn apply(self, x: &ExtendedRational) -> ExtendedRational {
        match self {
            GammaElement::Identity => x.clone(),
            GammaElement::Negate => x.neg(),
            GammaElement::NegRecip => x.recip().neg(),
            GammaElement::Recip => x.recip(),
        }
    }

    /// Some `g` with `g(w) = x`, if `x` lies in the orbit of `w`.
    pub fn carrying(w: &ExtendedRational, x: &ExtendedRational) -> Option<Self> {
        [
            GammaElement::Identity,
            GammaElement::Negate,
            GammaElement::NegRecip,
            GammaElement::Recip,
        ]
        .into_iter()
        .find(|g| &g.apply(w) == x)
    }

    /// Generator `M'` with `C(h_M(g(w))) = C(h_{M'}(w))` for every `w`.
    pub fn conjugate_generator(self, m: GeneratorIndex) -> GeneratorIndex {
        match self {
            GammaElement::Identity => m,
            GammaElement::Negate => negation_partner(m),
            GammaElement::NegRecip => inversion_partner(m),
            GammaElement::Recip => inversion_partner(negation_partner(m)),
        }
    }
}

/// `+1` or `−1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignPair {
    pub s1: Sign,
    pub s2: Sign,
}

impl SignPair {
    pub fn new(s1: Sign, s2: Sign) -> Self {
        Self { s1, s2 }
    }

    pub fn all() -> [Self; 4] {
        use Sign::*;
        [
            Self::new(Plus, Plus),
            Self::new(Plus, Minus),
            Self::new(Minus, Plus),
            Self::new(Minus, Minus),
        ]
    }

    pub fn draw<R: RngCore>(rng: &mut R) -> Self {
        let word = rng.next_u64();
        let sign = |bit: u64| if word >> bit & 1 == 0 { Sign::Plus } else { Sign::Minus };
        Self::new(sign(0), sign(1))
    }
}

/// `s_2 · w^{s_1}` for `w ∈ [0, 1]`. By convention `0` lifts to `0` when
/// `s_1 = +1` and to `∞` when `s_1 = −1`.
pub fn lift(w: &ExtendedRational, signs: SignPair) -> Result<ExtendedRational> {
    w.check_unit_interval("lift")?;
    let y = match signs.s1 {
        Sign::Plus => w.clone(),
        Sign::Minus => w.recip(),
    };
    Ok(match signs.s2 {
        Sign::Plus => y,
        Sign::Minus => y.neg(),
    })
}

pub fn lift_f64(w: f64, signs: SignPair) -> f64 {
    let y = match signs.s1 {
        Sign::Plus => w,
        Sign::Minus => 1.0 / w,
    };
    match signs.s2 {
        Sign::Plus => y,
        Sign::Minus => -y,
    }
}

/// One step of the coupled pair `(X_n, W_n = C(X_n))`.
///
/// `x' = h_M(x)`. The interval map applied to `w` is that of the generator `M'`
/// obtained by transporting `M` through the Γ-element carrying `w` to `x`;
/// `M ↦ M'` is a bijection, so the index driving `W` is still `ρ`-distributed,
/// and `C(x') = w'` holds exactly on every path.
pub fn coupled_step(
    x: &ExtendedRational,
    w: &ExtendedRational,
    m: GeneratorIndex,
) -> Result<(ExtendedRational, ExtendedRational)> {
    if &project_c(x) != w {
        return Err(Error::Coupling {
            x: x.to_string(),
            w: w.to_string(),
        });
    }
    let g = GammaElement::carrying(w, x).expect("x lies in the Γ-orbit of C(x)");
    let class = classify_generator(g.conjugate_generator(m));
    let x_next = ProjectiveMatrix::generator(m).mobius_real(x);
    let w_next = interval_map_unchecked(class, w);
    Ok((x_next, w_next))
}

/// Value of a boundary chain in either arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryValue {
    Exact(ExtendedRational),
    Float(f64),
}

impl BoundaryValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            BoundaryValue::Exact(x) => x.to_f64(),
            BoundaryValue::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&ExtendedRational> {
        match self {
            BoundaryValue::Exact(x) => Some(x),
            BoundaryValue::Float(_) => None,
        }
    }
}

impl fmt::Display for BoundaryValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryValue::Exact(x) => write!(f, "{x}"),
            BoundaryValue::Float(x) if x.is_infinite() => write!(f, "inf"),
            BoundaryValue::Float(x) => write!(f, "{x:.16e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrajectory {
    pub values: Vec<BoundaryValue>,
    /// First step computed exactly after a float trajectory came within
    /// [`POLE_GUARD`] of a pole.
    pub exact_from: Option<usize>,
}

impl BoundaryTrajectory {
    fn exact(values: Vec<ExtendedRational>) -> Self {
        Self {
            values: values.into_iter().map(BoundaryValue::Exact).collect(),
            exact_from: None,
        }
    }

    pub fn last(&self) -> &BoundaryValue {
        self.values.last().expect("trajectories contain the start value")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlaneValue {
    Exact(UpperHalfPoint),
    Float(FloatPoint),
}

impl PlaneValue {
    pub fn to_float(&self) -> FloatPoint {
        match self {
            PlaneValue::Exact(z) => z.to_float(),
            PlaneValue::Float(z) => *z,
        }
    }
}

impl fmt::Display for PlaneValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaneValue::Exact(z) => write!(f, "{z}"),
            PlaneValue::Float(z) => write!(f, "{z}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneTrajectory {
    pub values: Vec<PlaneValue>,
    /// First step at which `Im` underflowed; the walk has numerically reached `∂H`.
    pub underflow_at: Option<usize>,
}

/// `X_0 = x0`, `X_k = h_{word[k−1]}(X_{k−1})`.
pub fn run_x(x0: &ExtendedRational, word: &[GeneratorIndex]) -> Vec<ExtendedRational> {
    let mut out = Vec::with_capacity(word.len() + 1);
    out.push(x0.clone());
    let mut x = x0.clone();
    for &m in word {
        x = ProjectiveMatrix::generator(m).mobius_real(&x);
        out.push(x.clone());
    }
    out
}

/// `Y_k = h_{word[0]} ∘ ⋯ ∘ h_{word[k−1]}(x0)`, through the running product.
pub fn run_y(x0: &ExtendedRational, word: &[GeneratorIndex]) -> Vec<ExtendedRational> {
    let mut out = Vec::with_capacity(word.len() + 1);
    out.push(x0.clone());
    let mut product = ProjectiveMatrix::identity();
    for &m in word {
        product = product.multiply(&ProjectiveMatrix::generator(m));
        out.push(product.mobius_real(x0));
    }
    out
}

fn float_mobius(m: [f64; 4], x: f64) -> Option<f64> {
    let [a, b, c, d] = m;
    if x.is_infinite() {
        return Some(if c == 0.0 { f64::INFINITY } else { a / c });
    }
    let den = c * x + d;
    if den.abs() < POLE_GUARD {
        return None;
    }
    Some((a * x + b) / den)
}

fn generator_f64(m: GeneratorIndex) -> [f64; 4] {
    ProjectiveMatrix::generator(m).to_f64()
}

fn mat_mul_normalized(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    let r = [
        p[0] * q[0] + p[1] * q[2],
        p[0] * q[1] + p[1] * q[3],
        p[2] * q[0] + p[3] * q[2],
        p[2] * q[1] + p[3] * q[3],
    ];
    // Möbius maps are scale invariant; keep entries O(1).
    let s = r.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    r.map(|v| v / s)
}

/// Float `X` chain; continues exactly from the first near-pole step.
pub fn run_x_f64(x0: f64, word: &[GeneratorIndex]) -> BoundaryTrajectory {
    let mut values = vec![BoundaryValue::Float(x0)];
    let mut x = x0;
    for (k, &m) in word.iter().enumerate() {
        match float_mobius(generator_f64(m), x) {
            Some(next) => {
                x = next;
                values.push(BoundaryValue::Float(x));
            }
            None => {
                let start = ExtendedRational::from_f64(x).expect("finite float");
                let rest = run_x(&start, &word[k..]);
                values.extend(rest.into_iter().skip(1).map(BoundaryValue::Exact));
                return BoundaryTrajectory {
                    values,
                    exact_from: Some(k + 1),
                };
            }
        }
    }
    BoundaryTrajectory {
        values,
        exact_from: None,
    }
}

/// Float `Y` chain; recomputes exactly from the first near-pole step.
pub fn run_y_f64(x0: f64, word: &[GeneratorIndex]) -> BoundaryTrajectory {
    let mut values = vec![BoundaryValue::Float(x0)];
    let mut product = [1.0, 0.0, 0.0, 1.0];
    for (k, &m) in word.iter().enumerate() {
        product = mat_mul_normalized(product, generator_f64(m));
        match float_mobius(product, x0) {
            Some(y) => values.push(BoundaryValue::Float(y)),
            None => {
                let start = ExtendedRational::from_f64(x0).expect("finite float");
                let exact = run_y(&start, word);
                values.extend(exact.into_iter().skip(k + 1).map(BoundaryValue::Exact));
                return BoundaryTrajectory {
                    values,
                    exact_from: Some(k + 1),
                };
            }
        }
    }
    BoundaryTrajectory {
        values,
        exact_from: None,
    }
}

pub fn run_z(z0: &UpperHalfPoint, word: &[GeneratorIndex]) -> Vec<UpperHalfPoint> {
    let mut out = Vec::with_capacity(word.len() + 1);
    out.push(z0.clone());
    let mut z = z0.clone();
    for &m in word {
        z = ProjectiveMatrix::generator(m).mobius_complex(&z);
        out.push(z.clone());
    }
    out
}

pub fn run_v(z0: &UpperHalfPoint, word: &[GeneratorIndex]) -> Vec<UpperHalfPoint> {
    let mut out = Vec::with_capacity(word.len() + 1);
    out.push(z0.clone());
    let mut product = ProjectiveMatrix::identity();
    for &m in word {
        product = product.multiply(&ProjectiveMatrix::generator(m));
        out.push(product.mobius_complex(z0));
    }
    out
}

fn underflowed(z: FloatPoint) -> bool {
    !(z.im() > 0.0) || !z.re().is_finite()
}

pub fn run_z_f64(z0: FloatPoint, word: &[GeneratorIndex]) -> PlaneTrajectory {
    let mut values = vec![PlaneValue::Float(z0)];
    let mut underflow_at = None;
    let mut z = z0;
    for (k, &m) in word.iter().enumerate() {
        let [a, b, c, d] = generator_f64(m);
        z = FloatPoint((z.0 * a + b) / (z.0 * c + d));
        if underflow_at.is_none() && underflowed(z) {
            underflow_at = Some(k + 1);
        }
        values.push(PlaneValue::Float(z));
    }
    PlaneTrajectory {
        values,
        underflow_at,
    }
}

pub fn run_v_f64(z0: FloatPoint, word: &[GeneratorIndex]) -> PlaneTrajectory {
    let mut values = vec![PlaneValue::Float(z0)];
    let mut underflow_at = None;
    let mut product = [1.0, 0.0, 0.0, 1.0];
    for (k, &m) in word.iter().enumerate() {
        product = mat_mul_normalized(product, generator_f64(m));
        let [a, b, c, d] = product;
        let z = FloatPoint((z0.0 * a + b) / (z0.0 * c + d));
        if underflow_at.is_none() && underflowed(z) {
            underflow_at = Some(k + 1);
        }
        values.push(PlaneValue::Float(z));
    }
    PlaneTrajectory {
        values,
        underflow_at,
    }
}

pub fn run_w(w0: &ExtendedRational, maps: &[IntervalMapIndex]) -> Result<Vec<ExtendedRational>> {
    w0.check_unit_interval("W start")?;
    let mut out = Vec::with_capacity(maps.len() + 1);
    out.push(w0.clone());
    let mut w = w0.clone();
    for &i in maps {
        w = interval_map_unchecked(i, &w);
        out.push(w.clone());
    }
    Ok(out)
}

pub fn run_u(u0: &ExtendedRational, quotients: &[u64]) -> Result<Vec<ExtendedRational>> {
    u0.check_unit_interval("U start")?;
    if quotients.contains(&0) {
        return Err(Error::domain("partial quotient", 0));
    }
    let mut out = Vec::with_capacity(quotients.len() + 1);
    out.push(u0.clone());
    let mut u = u0.clone();
    for &k in quotients {
        u = u.unimodular_map(&BigInt::zero(), &BigInt::one(), &BigInt::one(), &BigInt::from(k));
        out.push(u.clone());
    }
    Ok(out)
}

fn par_trajectories<T, F>(cfg: &WalkConfig, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha20Rng) -> T + Sync,
{
    (0..cfg.trajectories)
        .into_par_iter()
        .map(|j| f(&mut cfg.rng(j)))
        .collect()
}

fn float_start(x0: &ExtendedRational, cfg: &WalkConfig) -> Option<f64> {
    (cfg.mode == Mode::Float).then(|| x0.to_f64())
}

pub fn simulate_x(x0: &ExtendedRational, cfg: &WalkConfig) -> Vec<BoundaryTrajectory> {
    let start = float_start(x0, cfg);
    par_trajectories(cfg, |rng| {
        let word = draw_word(rng, cfg.steps);
        match start {
            Some(x) => run_x_f64(x, &word),
            None => BoundaryTrajectory::exact(run_x(x0, &word)),
        }
    })
}

pub fn simulate_y(x0: &ExtendedRational, cfg: &WalkConfig) -> Vec<BoundaryTrajectory> {
    let start = float_start(x0, cfg);
    par_trajectories(cfg, |rng| {
        let word = draw_word(rng, cfg.steps);
        match start {
            Some(x) => run_y_f64(x, &word),
            None => BoundaryTrajectory::exact(run_y(x0, &word)),
        }
    })
}

fn simulate_plane(
    z0: &UpperHalfPoint,
    cfg: &WalkConfig,
    exact: fn(&UpperHalfPoint, &[GeneratorIndex]) -> Vec<UpperHalfPoint>,
    float: fn(FloatPoint, &[GeneratorIndex]) -> PlaneTrajectory,
) -> Vec<PlaneTrajectory> {
    let zf = z0.to_float();
    par_trajectories(cfg, |rng| {
        let word = draw_word(rng, cfg.steps);
        match cfg.mode {
            Mode::Float => float(zf, &word),
            Mode::Exact => PlaneTrajectory {
                values: exact(z0, &word).into_iter().map(PlaneValue::Exact).collect(),
                underflow_at: None,
            },
        }
    })
}

pub fn simulate_z(z0: &UpperHalfPoint, cfg: &WalkConfig) -> Vec<PlaneTrajectory> {
    simulate_plane(z0, cfg, run_z, run_z_f64)
}

pub fn simulate_v(z0: &UpperHalfPoint, cfg: &WalkConfig) -> Vec<PlaneTrajectory> {
    simulate_plane(z0, cfg, run_v, run_v_f64)
}

/// Interval-map indices `I_k = class(M_k)`, distributed as `ρ`.
pub fn draw_interval_maps<R: RngCore>(rng: &mut R, steps: usize) -> Vec<IntervalMapIndex> {
    (0..steps)
        .map(|_| classify_generator(draw_generator(rng)))
        .collect()
}

pub fn simulate_w(w0: &ExtendedRational, cfg: &WalkConfig) -> Result<Vec<BoundaryTrajectory>> {
    w0.check_unit_interval("W start")?;
    let start = w0.to_f64();
    Ok(par_trajectories(cfg, |rng| {
        let maps = draw_interval_maps(rng, cfg.steps);
        match cfg.mode {
            Mode::Exact => BoundaryTrajectory::exact(run_w(w0, &maps).expect("checked start")),
            Mode::Float => {
                let mut w = start;
                let mut values = vec![BoundaryValue::Float(w)];
                for &i in &maps {
                    w = interval_map_f64(i, w);
                    values.push(BoundaryValue::Float(w));
                }
                BoundaryTrajectory {
                    values,
                    exact_from: None,
                }
            }
        }
    }))
}

pub fn simulate_u(u0: &ExtendedRational, cfg: &WalkConfig) -> Result<Vec<BoundaryTrajectory>> {
    u0.check_unit_interval("U start")?;
    let start = u0.to_f64();
    Ok(par_trajectories(cfg, |rng| {
        let ks: Vec<u64> = (0..cfg.steps).map(|_| draw_geometric(rng)).collect();
        match cfg.mode {
            Mode::Exact => BoundaryTrajectory::exact(run_u(u0, &ks).expect("checked start")),
            Mode::Float => {
                let mut u = start;
                let mut values = vec![BoundaryValue::Float(u)];
                for &k in &ks {
                    u = 1.0 / (k as f64 + u);
                    values.push(BoundaryValue::Float(u));
                }
                BoundaryTrajectory {
                    values,
                    exact_from: None,
                }
            }
        }
    }))
}

/// Samples from a stationary law, truncated at a fixed continued-fraction depth.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryBatch {
    pub samples: Vec<BoundaryValue>,
    pub depth: usize,
    /// Largest `2 · 2^{−(K_1+…+K_m)}` over the batch: the `?`-mass of the
    /// cylinder each truncated sample stands for.
    pub truncation_bound: f64,
}

impl StationaryBatch {
    pub fn exact_samples(&self) -> Option<Vec<ExtendedRational>> {
        self.samples.iter().map(|s| s.as_exact().cloned()).collect()
    }

    pub fn float_samples(&self) -> Vec<f64> {
        self.samples.iter().map(BoundaryValue::to_f64).collect()
    }
}

fn truncated_sample(
    rng: &mut ChaCha20Rng,
    head: u64,
    depth: usize,
    mode: Mode,
) -> (BoundaryValue, f64) {
    let ks: Vec<u64> = (0..depth).map(|_| draw_geometric(rng)).collect();
    let total: u64 = ks.iter().sum();
    let bound = 2f64.powi(1 - total.min(2000) as i32);
    let cf = ContinuedFraction::from_u64s(head, &ks).expect("geometric draws are positive");
    let value = match mode {
        Mode::Exact => BoundaryValue::Exact(cf.value()),
        Mode::Float => BoundaryValue::Float(cf.value_f64()),
    };
    (value, bound)
}

fn collect_batch(parts: Vec<(BoundaryValue, f64)>, depth: usize) -> StationaryBatch {
    let truncation_bound = parts.iter().fold(0.0f64, |m, (_, b)| m.max(*b));
    StationaryBatch {
        samples: parts.into_iter().map(|(v, _)| v).collect(),
        depth,
        truncation_bound,
    }
}

fn check_depth(depth: usize) -> Result<()> {
    if depth == 0 {
        Err(Error::domain("stationary depth", depth))
    } else {
        Ok(())
    }
}

/// `W = [0; K_1, …, K_m]` with i.i.d. `Pr(K = n) = 2^{−n}`; one sample per trajectory.
pub fn sample_stationary_w(cfg: &WalkConfig, depth: usize) -> Result<StationaryBatch> {
    check_depth(depth)?;
    let parts = par_trajectories(cfg, |rng| truncated_sample(rng, 0, depth, cfg.mode));
    Ok(collect_batch(parts, depth))
}

/// `Y = [K_0 − 1; K_1, …, K_m]`, whose survival function is `χ_{1/2}`.
pub fn sample_stationary_y(cfg: &WalkConfig, depth: usize) -> Result<StationaryBatch> {
    check_depth(depth)?;
    let parts = par_trajectories(cfg, |rng| {
        let k0 = draw_geometric(rng);
        truncated_sample(rng, k0 - 1, depth, cfg.mode)
    });
    Ok(collect_batch(parts, depth))
}

/// `X = S_2 W^{S_1}` with `W` as in [`sample_stationary_w`] and fair signs.
pub fn sample_stationary_x(cfg: &WalkConfig, depth: usize) -> Result<StationaryBatch> {
    check_depth(depth)?;
    let parts = par_trajectories(cfg, |rng| {
        let (w, bound) = truncated_sample(rng, 0, depth, cfg.mode);
        let signs = SignPair::draw(rng);
        let x = match w {
            BoundaryValue::Exact(w) => BoundaryValue::Exact(lift(&w, signs).expect("w in (0,1]")),
            BoundaryValue::Float(w) => BoundaryValue::Float(lift_f64(w, signs)),
        };
        (x, bound)
    });
    Ok(collect_batch(parts, depth))
}

/// Integer part of a positive sample: `⌊y⌋ + 1`.
pub fn geometric_index(y: &ExtendedRational) -> Option<u64> {
    use num_traits::ToPrimitive;
    let f = y.floor()?;
    if f.is_negative() {
        return None;
    }
    (f + 1u32).to_u64()
}
