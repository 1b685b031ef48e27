//! Homogeneous setups: a Lie algebra `h = T ⊕ g` given by structure constants,
//! a representation of `g` on the fiber `V`, and the exterior derivative on
//! forms over the working frame `{e^t, b_i, e^A}`.
//!
//! Conventions: `de^i = sum_{j<k} c^i_{jk} e^{jk}`, so that `[E_j, E_k] =
//! -sum_i c^i_{jk} E_i`. The vertical one-forms are
//! `b_i = da_i + sum_A sum_j R(A)_{ij} a_j e^A` where `R(A)` is `rho(A)` or its
//! transpose, whichever annihilates every fundamental contraction.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{bits, Form, Frame, Generator, Tag, Word};
use crate::linalg::{kernel, Echelon, SparseVec};
use crate::number::Number;
use crate::ring::{Point, Ring, Scalar};

pub type Mat = Vec<Vec<Number>>;

/// One structure constant `c^i_{jk}` with 1-based indices.
#[derive(Clone, Debug)]
pub struct StructureConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: Number,
}

#[derive(Clone, Debug)]
pub struct SetupInput {
    pub ring: Arc<Ring>,
    pub dimension: usize,
    pub constants: Vec<StructureConstant>,
    /// 1-based algebra indices spanning `T`, in frame order.
    pub horizontal: Vec<usize>,
    /// 1-based algebra indices spanning `g`, in frame order.
    pub gauge: Vec<usize>,
    /// `rho(E_A)` for each gauge element, in the order of `gauge`.
    pub representation: Vec<Mat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexConvention {
    /// `b_i = da_i + sum_j rho(A)_{ij} a_j e^A`
    Row,
    /// `b_i = da_i + sum_j rho(A)_{ji} a_j e^A`
    Column,
}

pub struct HomogeneousSetup {
    ring: Arc<Ring>,
    n: usize,
    // c[i][j][k], antisymmetric in (j, k)
    c: Vec<Vec<Vec<Number>>>,
    horizontal: Vec<usize>,
    gauge: Vec<usize>,
    rho: Vec<Mat>,
    ad_t: Vec<Mat>,
    conn: Vec<Mat>,
    convention: IndexConvention,
    warnings: Vec<String>,
    frame: Arc<Frame>,
    raw_frame: Arc<Frame>,
    pos: Vec<usize>,
    d_gen: Vec<Form<Scalar>>,
    da_work: Vec<Form<Scalar>>,
    d_cache: Mutex<HashMap<Word, Form<Scalar>>>,
}

impl std::fmt::Debug for HomogeneousSetup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HomogeneousSetup")
            .field("dimension", &self.n)
            .field("horizontal", &self.horizontal)
            .field("gauge", &self.gauge)
            .field("convention", &self.convention)
            .finish()
    }
}

fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![Number::zero(); c]; r]
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = zeros(n, m);
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] = out[i][j].add(&a[i][k].mul(&bk[j]));
            }
        }
    }
    out
}

fn transpose(a: &Mat) -> Mat {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

fn is_skew(a: &Mat) -> bool {
    let n = a.len();
    (0..n).all(|i| (0..n).all(|j| a[i][j].add(&a[j][i]).is_zero()))
}

fn is_orthogonal(a: &Mat) -> bool {
    let p = mat_mul(a, &transpose(a));
    let n = a.len();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let expect = if i == j { Number::one() } else { Number::zero() };
            p[i][j] == expect
        })
    })
}

/// Derivation extended from generator images: odd derivations pick up the
/// sign `(-1)^k` when passing `k` generators.
fn derive_word<C: crate::forms::Coeff>(
    frame: &Arc<Frame>,
    w: Word,
    images: &dyn Fn(usize) -> Form<C>,
    one: &C,
    odd: bool,
) -> Form<C> {
    let mut out = Form::zero(frame);
    let gens: Vec<usize> = bits(w).collect();
    for (k, &g) in gens.iter().enumerate() {
        let img = images(g);
        if img.is_zero() {
            continue;
        }
        let prefix: Word = gens[..k].iter().fold(0, |m, &x| m | (1 << x));
        let suffix: Word = gens[k + 1..].iter().fold(0, |m, &x| m | (1 << x));
        let mut term = Form::monomial(frame, prefix, one.clone())
            .wedge_unchecked(&img)
            .wedge_unchecked(&Form::monomial(frame, suffix, one.clone()));
        if odd && k % 2 == 1 {
            term = term.neg();
        }
        out = out.add(&term);
    }
    out
}

impl HomogeneousSetup {
    pub fn validate(input: SetupInput) -> Result<HomogeneousSetup> {
        let n = input.dimension;
        let ring = input.ring.clone();
        let k = ring.nfib();
        // splitting
        let mut seen = vec![false; n];
        for &i in input.horizontal.iter().chain(&input.gauge) {
            if i == 0 || i > n {
                return Err(Error::Config(format!("splitting index {i} out of range 1..{n}")));
            }
            if seen[i - 1] {
                return Err(Error::Config(format!("splitting index {i} listed twice")));
            }
            seen[i - 1] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Config(format!(
                "splitting does not partition 1..{n}: index {} missing",
                i + 1
            )));
        }
        let horizontal: Vec<usize> = input.horizontal.iter().map(|i| i - 1).collect();
        let gauge: Vec<usize> = input.gauge.iter().map(|i| i - 1).collect();
        let nt = horizontal.len();
        let ng = gauge.len();
        if input.representation.len() != ng {
            return Err(Error::Config(format!(
                "representation lists {} matrices for {} gauge elements",
                input.representation.len(),
                ng
            )));
        }
        for m in &input.representation {
            if m.len() != k || m.iter().any(|r| r.len() != k) {
                return Err(Error::Config(format!(
                    "representation matrices must be {k}x{k} (one row per fiber variable)"
                )));
            }
        }
        // structure constants
        let mut c = vec![vec![vec![Number::zero(); n]; n]; n];
        for sc in &input.constants {
            let (i, j, kk) = (sc.i, sc.j, sc.k);
            if [i, j, kk].iter().any(|&x| x == 0 || x > n) {
                return Err(Error::Config(format!(
                    "structure constant index ({i},{j},{kk}) out of range 1..{n}"
                )));
            }
            if j == kk {
                return Err(Error::Config(format!("structure constant c^{i}_{{{j}{kk}}} has j = k")));
            }
            let (i, j, kk) = (i - 1, j - 1, kk - 1);
            if !c[i][j][kk].is_zero() {
                return Err(Error::Config(format!(
                    "structure constant c^{}_{{{}{}}} given twice",
                    i + 1,
                    j + 1,
                    kk + 1
                )));
            }
            c[i][j][kk] = sc.value.clone();
            c[i][kk][j] = sc.value.neg();
        }

        let mut violations = Vec::new();
        if let Err(e) = check_jacobi(n, &c) {
            violations.push(e);
        }
        // subalgebra and reductivity
        for &t in &horizontal {
            for (ai, &a) in gauge.iter().enumerate() {
                for &b in &gauge[ai + 1..] {
                    if !c[t][a][b].is_zero() {
                        violations.push(Error::NonReductive(format!(
                            "[e_{}, e_{}] has a component along e_{} in T",
                            a + 1,
                            b + 1,
                            t + 1
                        )));
                    }
                }
            }
        }
        for &a in &gauge {
            for &b in &gauge {
                for &t in &horizontal {
                    if !c[a][b][t].is_zero() {
                        violations.push(Error::NonReductive(format!(
                            "[e_{}, e_{}] has a component along e_{} in g",
                            b + 1,
                            t + 1,
                            a + 1
                        )));
                    }
                }
            }
        }
        let rho = input.representation.clone();
        // homomorphism: rho([A,B]) = [rho A, rho B], [E_A,E_B] = -sum_C c^C_{AB} E_C
        for ai in 0..ng {
            for bi in ai + 1..ng {
                let ab = mat_mul(&rho[ai], &rho[bi]);
                let ba = mat_mul(&rho[bi], &rho[ai]);
                let mut lhs = zeros(k, k);
                for ci in 0..ng {
                    let coef = c[gauge[ci]][gauge[ai]][gauge[bi]].neg();
                    if coef.is_zero() {
                        continue;
                    }
                    for r in 0..k {
                        for s in 0..k {
                            lhs[r][s] = lhs[r][s].add(&coef.mul(&rho[ci][r][s]));
                        }
                    }
                }
                let ok = (0..k).all(|r| (0..k).all(|s| lhs[r][s] == ab[r][s].sub(&ba[r][s])));
                if !ok {
                    violations.push(Error::NotHomomorphism(format!(
                        "rho([e_{}, e_{}]) differs from the commutator",
                        gauge[ai] + 1,
                        gauge[bi] + 1
                    )));
                }
            }
        }
        for (ai, m) in rho.iter().enumerate() {
            if !is_skew(m) {
                violations.push(Error::NotOrthogonal(format!(
                    "rho(e_{}) is not skew-symmetric",
                    gauge[ai] + 1
                )));
            }
        }
        match violations.len() {
            0 => {}
            1 => return Err(violations.pop().unwrap()),
            _ => return Err(Error::SetupInvalid(violations.iter().map(|e| e.to_string()).collect())),
        }

        let mut warnings = Vec::new();
        let ad_t: Vec<Mat> = gauge
            .iter()
            .map(|&a| {
                (0..nt)
                    .map(|ti| (0..nt).map(|si| c[horizontal[ti]][a][horizontal[si]].neg()).collect())
                    .collect()
            })
            .collect();
        for (ai, m) in ad_t.iter().enumerate() {
            if !is_skew(m) {
                warnings.push(format!(
                    "ad(e_{})|_T is not skew: the declared T-basis is not orthonormal for an invariant metric",
                    gauge[ai] + 1
                ));
            }
        }

        // frames
        let mut gens: Vec<Generator> = horizontal
            .iter()
            .map(|&t| Generator::new("e", t + 1, Tag::Horizontal))
            .collect();
        gens.extend((0..k).map(|i| Generator::new("b", i + 1, Tag::Vertical)));
        gens.extend(gauge.iter().map(|&a| Generator::new("e", a + 1, Tag::Gauge)));
        let frame = Frame::new(gens)?;
        let mut raw: Vec<Generator> = (0..n)
            .map(|i| {
                let tag = if horizontal.contains(&i) { Tag::Horizontal } else { Tag::Gauge };
                Generator::new("e", i + 1, tag)
            })
            .collect();
        raw.extend((0..k).map(|i| Generator::new("da", i + 1, Tag::RawVertical)));
        let raw_frame = Frame::new(raw)?;
        let mut pos = vec![0; n];
        for (ti, &t) in horizontal.iter().enumerate() {
            pos[t] = ti;
        }
        for (ai, &a) in gauge.iter().enumerate() {
            pos[a] = nt + k + ai;
        }

        let mut setup = HomogeneousSetup {
            ring,
            n,
            c,
            horizontal,
            gauge,
            rho,
            ad_t,
            conn: Vec::new(),
            convention: IndexConvention::Row,
            warnings,
            frame,
            raw_frame,
            pos,
            d_gen: Vec::new(),
            da_work: Vec::new(),
            d_cache: Mutex::new(HashMap::new()),
        };
        setup.select_convention()?;
        setup.build_derivative_rules();
        Ok(setup)
    }

    fn select_convention(&mut self) -> Result<()> {
        for conv in [IndexConvention::Row, IndexConvention::Column] {
            self.convention = conv;
            self.conn = match conv {
                IndexConvention::Row => self.rho.clone(),
                IndexConvention::Column => self.rho.iter().map(transpose).collect(),
            };
            let bs = self.build_vertical_frame();
            let ok = (0..self.gauge.len())
                .all(|a| bs.iter().all(|b| self.fundamental_contraction(a, b).is_zero()));
            if ok {
                return Ok(());
            }
        }
        Err(Error::SetupInvalid(vec![
            "no index convention for b_i is annihilated by the fundamental fields".into(),
        ]))
    }

    fn build_derivative_rules(&mut self) {
        let k = self.ring.nfib();
        let nt = self.horizontal.len();
        let one = self.one();
        let frame = self.frame.clone();
        // da_i = b_i - sum_B sum_l R(B)_{il} a_l e^B
        self.da_work = (0..k)
            .map(|i| {
                let mut f = Form::generator(&frame, nt + i, one.clone());
                for (bi, m) in self.conn.iter().enumerate() {
                    let mut coef = Scalar::zero(&self.ring);
                    for l in 0..k {
                        if !m[i][l].is_zero() {
                            coef = coef.add(&Scalar::fiber(&self.ring, l).scale(&m[i][l]));
                        }
                    }
                    f = f.sub(&Form::generator(&frame, nt + k + bi, coef));
                }
                f
            })
            .collect();
        let mut d_alg: Vec<Form<Scalar>> = Vec::new();
        for i in 0..self.n {
            let mut f = Form::zero(&frame);
            for j in 0..self.n {
                for kk in j + 1..self.n {
                    let v = &self.c[i][j][kk];
                    if v.is_zero() {
                        continue;
                    }
                    let x = Form::generator(&frame, self.pos[j], Scalar::constant(&self.ring, v.clone()))
                        .wedge_unchecked(&Form::generator(&frame, self.pos[kk], one.clone()));
                    f = f.add(&x);
                }
            }
            d_alg.push(f);
        }
        let mut d_gen = vec![Form::zero(&frame); frame.len()];
        for i in 0..self.n {
            d_gen[self.pos[i]] = d_alg[i].clone();
        }
        for i in 0..k {
            // d b_i = sum_A sum_j R(A)_{ij} (da_j ∧ e^A + a_j de^A)
            let mut f = Form::zero(&frame);
            for (ai, m) in self.conn.iter().enumerate() {
                let ea = Form::generator(&frame, nt + k + ai, one.clone());
                for j in 0..k {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    let coef = Scalar::constant(&self.ring, m[i][j].clone());
                    let t1 = self.da_work[j].wedge_unchecked(&ea).scale(&coef);
                    let t2 = d_alg[self.gauge[ai]].scale(&Scalar::fiber(&self.ring, j).mul(&coef));
                    f = f.add(&t1).add(&t2);
                }
            }
            d_gen[nt + i] = f;
        }
        self.d_gen = d_gen;
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    /// Working frame `{e^t (horizontal), b_i, e^A (gauge)}`.
    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    /// Raw frame `{e^1..e^n, da_1..da_k}` in algebra order.
    pub fn raw_frame(&self) -> &Arc<Frame> {
        &self.raw_frame
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.ring.nfib()
    }

    /// 1-based horizontal algebra indices.
    pub fn horizontal(&self) -> Vec<usize> {
        self.horizontal.iter().map(|i| i + 1).collect()
    }

    /// 1-based gauge algebra indices.
    pub fn gauge(&self) -> Vec<usize> {
        self.gauge.iter().map(|i| i + 1).collect()
    }

    pub fn convention(&self) -> IndexConvention {
        self.convention
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn rho(&self, a: usize) -> &Mat {
        &self.rho[a]
    }

    /// Matrix `R(A)` entering `b_i = da_i + sum_j R(A)_{ij} a_j e^A`.
    pub fn connection(&self, a: usize) -> &Mat {
        &self.conn[a]
    }

    pub fn gauge_count(&self) -> usize {
        self.gauge.len()
    }

    /// `ad(E_A)` restricted to `T`, in the horizontal basis.
    pub fn ad_t(&self, a: usize) -> &Mat {
        &self.ad_t[a]
    }

    /// Structure constant `c^i_{jk}` with 1-based indices.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Number {
        &self.c[i - 1][j - 1][k - 1]
    }

    pub fn one(&self) -> Scalar {
        Scalar::one(&self.ring)
    }

    pub fn basic_mask(&self) -> Word {
        self.frame.mask(Tag::Horizontal) | self.frame.mask(Tag::Vertical)
    }

    pub fn gauge_mask(&self) -> Word {
        self.frame.mask(Tag::Gauge)
    }

    /// Working-frame generator by name (`e2`, `b1`, ...).
    pub fn generator(&self, name: &str) -> Option<Form<Scalar>> {
        self.frame
            .index_of(name)
            .map(|i| Form::generator(&self.frame, i, self.one()))
    }

    /// `e^i` for a 1-based algebra index, in the working frame.
    pub fn e(&self, i: usize) -> Form<Scalar> {
        Form::generator(&self.frame, self.pos[i - 1], self.one())
    }

    /// `b_i` for a 1-based fiber index, in the working frame.
    pub fn b(&self, i: usize) -> Form<Scalar> {
        Form::generator(&self.frame, self.horizontal.len() + i - 1, self.one())
    }

    pub fn scalar_form(&self, f: Scalar) -> Form<Scalar> {
        Form::monomial(&self.frame, 0, f)
    }

    /// `da_i` expressed in the working frame.
    pub fn da(&self, i: usize) -> &Form<Scalar> {
        &self.da_work[i - 1]
    }

    /// The forms `b_i` in the raw frame `{e^i, da_j}`.
    pub fn build_vertical_frame(&self) -> Vec<Form<Scalar>> {
        let k = self.ring.nfib();
        let raw = &self.raw_frame;
        (0..k)
            .map(|i| {
                let mut f = Form::generator(raw, self.n + i, self.one());
                for (ai, m) in self.conn.iter().enumerate() {
                    let mut coef = Scalar::zero(&self.ring);
                    for j in 0..k {
                        if !m[i][j].is_zero() {
                            coef = coef.add(&Scalar::fiber(&self.ring, j).scale(&m[i][j]));
                        }
                    }
                    f = f.add(&Form::generator(raw, self.gauge[ai], coef));
                }
                f
            })
            .collect()
    }

    /// `(rho(A) a)_i` as a scalar.
    fn rho_a(&self, a: usize, i: usize) -> Scalar {
        let m = &self.rho[a];
        let mut s = Scalar::zero(&self.ring);
        for j in 0..self.ring.nfib() {
            if !m[i][j].is_zero() {
                s = s.add(&Scalar::fiber(&self.ring, j).scale(&m[i][j]));
            }
        }
        s
    }

    /// Contraction with the fundamental vector field of the `a`-th gauge
    /// element (0-based). Works on forms over either frame.
    pub fn fundamental_contraction(&self, a: usize, x: &Form<Scalar>) -> Form<Scalar> {
        if x.same_frame(&Form::zero(&self.raw_frame)) {
            let frame = &self.raw_frame;
            let ga = self.gauge[a];
            let images: Vec<Scalar> = (0..frame.len())
                .map(|g| {
                    if g == ga {
                        self.one()
                    } else if g >= self.n {
                        self.rho_a(a, g - self.n).neg()
                    } else {
                        Scalar::zero(&self.ring)
                    }
                })
                .collect();
            let mut out = Form::zero(frame);
            for (w, c) in x.terms() {
                let gens: Vec<usize> = bits(w).collect();
                for (pi, &g) in gens.iter().enumerate() {
                    if images[g].is_zero() {
                        continue;
                    }
                    let rest = w & !(1u64 << g);
                    let mut coef = c.mul(&images[g]);
                    if pi % 2 == 1 {
                        coef = coef.neg();
                    }
                    out.add_term(rest, coef);
                }
            }
            out
        } else {
            x.interior(self.horizontal.len() + self.ring.nfib() + a)
        }
    }

    /// Rewrite a raw-frame form in the working frame.
    pub fn from_raw(&self, x: &Form<Scalar>) -> Form<Scalar> {
        let images: Vec<Form<Scalar>> = (0..self.raw_frame.len())
            .map(|g| {
                if g < self.n {
                    self.e(g + 1)
                } else {
                    self.da_work[g - self.n].clone()
                }
            })
            .collect();
        x.substitute(&self.frame, &images)
    }

    /// Rewrite a working-frame form in the raw frame.
    pub fn to_raw(&self, x: &Form<Scalar>) -> Form<Scalar> {
        let nt = self.horizontal.len();
        let k = self.ring.nfib();
        let bs = self.build_vertical_frame();
        let images: Vec<Form<Scalar>> = (0..self.frame.len())
            .map(|g| {
                if g < nt {
                    Form::generator(&self.raw_frame, self.horizontal[g], self.one())
                } else if g < nt + k {
                    bs[g - nt].clone()
                } else {
                    Form::generator(&self.raw_frame, self.gauge[g - nt - k], self.one())
                }
            })
            .collect();
        x.substitute(&self.raw_frame, &images)
    }

    /// Exterior derivative on the raw frame: `d e^i` from the structure
    /// constants, `d(da_i) = 0`, `d f = sum_i (df/da_i) da_i`.
    pub fn d_raw(&self, x: &Form<Scalar>) -> Form<Scalar> {
        let frame = &self.raw_frame;
        let one = self.one();
        let n = self.n;
        let gen_d = |g: usize| -> Form<Scalar> {
            let mut f = Form::zero(frame);
            if g < n {
                for j in 0..n {
                    for kk in j + 1..n {
                        let v = &self.c[g][j][kk];
                        if !v.is_zero() {
                            f.add_term((1 << j) | (1 << kk), Scalar::constant(&self.ring, v.clone()));
                        }
                    }
                }
            }
            f
        };
        let mut out = Form::zero(frame);
        for (w, c) in x.terms() {
            for i in 0..self.ring.nfib() {
                let dc = c.differentiate(i);
                if !dc.is_zero() {
                    let t = Form::generator(frame, n + i, dc)
                        .wedge_unchecked(&Form::monomial(frame, w, one.clone()));
                    out = out.add(&t);
                }
            }
            let dw = derive_word(frame, w, &gen_d, &one, true);
            out = out.add(&dw.scale(c));
        }
        out
    }

    /// d computed literally by pulling back: working → raw, d, raw → working.
    pub fn pullback_derivative(&self, x: &Form<Scalar>) -> Form<Scalar> {
        self.from_raw(&self.d_raw(&self.to_raw(x)))
    }

    fn d_word(&self, w: Word) -> Form<Scalar> {
        if let Some(f) = self.d_cache.lock().unwrap().get(&w) {
            return f.clone();
        }
        let f = derive_word(&self.frame, w, &|g| self.d_gen[g].clone(), &self.one(), true);
        self.d_cache.lock().unwrap().insert(w, f.clone());
        f
    }

    /// `d f` of a coefficient function in the working frame.
    pub fn d_scalar(&self, f: &Scalar) -> Form<Scalar> {
        let mut out = Form::zero(&self.frame);
        for i in 0..self.ring.nfib() {
            let df = f.differentiate(i);
            if !df.is_zero() {
                out = out.add(&self.da_work[i].scale(&df));
            }
        }
        out
    }

    /// Exterior derivative on the full working frame (gauge generators allowed).
    pub fn d_extended(&self, x: &Form<Scalar>) -> Form<Scalar> {
        let mut out = Form::zero(&self.frame);
        for (w, c) in x.terms() {
            let dc = self.d_scalar(c);
            if !dc.is_zero() {
                out = out.add(&dc.wedge_unchecked(&Form::monomial(&self.frame, w, self.one())));
            }
            if w != 0 {
                out = out.add(&self.d_word(w).scale(c));
            }
        }
        out
    }

    /// Exterior derivative of a basic form; the result must be basic again.
    pub fn exterior_derivative(&self, x: &Form<Scalar>) -> Result<Form<Scalar>> {
        self.check_frame(x)?;
        if x.touches(self.gauge_mask()) {
            return Err(Error::NotBasic(x.to_string()));
        }
        let dx = self.d_extended(x);
        if dx.touches(self.gauge_mask()) {
            let residual: Form<Scalar> = {
                let mut r = Form::zero(&self.frame);
                for (w, c) in dx.terms() {
                    if w & self.gauge_mask() != 0 {
                        r.add_term(w, c.clone());
                    }
                }
                r
            };
            return Err(Error::ResultNotBasic(residual.to_string()));
        }
        Ok(dx)
    }

    fn check_frame(&self, x: &Form<Scalar>) -> Result<()> {
        if x.same_frame(&Form::zero(&self.frame)) {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }

    pub fn is_basic(&self, x: &Form<Scalar>) -> bool {
        let w = if x.same_frame(&Form::zero(&self.raw_frame)) {
            self.from_raw(x)
        } else {
            x.clone()
        };
        !w.touches(self.gauge_mask())
    }

    /// Infinitesimal gauge variation of a working-frame form along the
    /// `a`-th gauge element (the Lie derivative along its fundamental field).
    pub fn variation(&self, a: usize, x: &Form<Scalar>) -> Form<Scalar> {
        let nt = self.horizontal.len();
        let k = self.ring.nfib();
        let frame = &self.frame;
        let ga = self.gauge[a];
        let images = |g: usize| -> Form<Scalar> {
            let mut f = Form::zero(frame);
            if g < nt {
                // delta e^t = sum_s c^t_{A s} e^s
                let t = self.horizontal[g];
                for (si, &s) in self.horizontal.iter().enumerate() {
                    let v = &self.c[t][ga][s];
                    if !v.is_zero() {
                        f.add_term(1 << si, Scalar::constant(&self.ring, v.clone()));
                    }
                }
            } else if g < nt + k {
                // delta b_i = -sum_j rho(A)_{ij} b_j
                let i = g - nt;
                for j in 0..k {
                    let v = &self.rho[a][i][j];
                    if !v.is_zero() {
                        f.add_term(1 << (nt + j), Scalar::constant(&self.ring, v.neg()));
                    }
                }
            }
            f
        };
        let one = self.one();
        let mut out = Form::zero(frame);
        for (w, c) in x.terms() {
            // delta f = -sum_i (rho(A) a)_i df/da_i
            let mut dc = Scalar::zero(&self.ring);
            for i in 0..k {
                let di = c.differentiate(i);
                if !di.is_zero() {
                    dc = dc.sub(&self.rho_a(a, i).mul(&di));
                }
            }
            out.add_term(w, dc);
            if w != 0 {
                out = out.add(&derive_word(frame, w, &images, &one, false).scale(c));
            }
        }
        out
    }

    pub fn is_invariant(&self, x: &Form<Scalar>) -> bool {
        self.is_basic(x) && (0..self.gauge.len()).all(|a| self.variation(a, x).is_zero())
    }

    /// Basis (in gauge coordinates) of the Lie algebra of the stabilizer of
    /// the fiber point of `pt`.
    pub fn stabilizer_algebra(&self, pt: &Point) -> Vec<Vec<Number>> {
        self.stabilizer_of(pt.fiber())
    }

    pub fn stabilizer_of(&self, v: &[Number]) -> Vec<Vec<Number>> {
        let k = self.ring.nfib();
        let ng = self.gauge.len();
        let rows: Vec<Vec<Number>> = (0..k)
            .map(|i| {
                (0..ng)
                    .map(|a| {
                        (0..k).fold(Number::zero(), |acc, j| acc.add(&self.rho[a][i][j].mul(&v[j])))
                    })
                    .collect()
            })
            .collect();
        kernel(&rows, ng)
    }

    /// Dimension of the subspace of `Λ^p T ⊗ Λ^q V` annihilated by the
    /// stabilizer algebra and fixed by the given extra group elements
    /// `(g_T, g_V)`.
    pub fn invariant_dimension(
        &self,
        (p, q): (usize, usize),
        stab: &[Vec<Number>],
        extras: &[(Mat, Mat)],
    ) -> Result<usize> {
        let nt = self.horizontal.len();
        let k = self.ring.nfib();
        for (gt, gv) in extras {
            if gt.len() != nt || gv.len() != k || !is_orthogonal(gt) || !is_orthogonal(gv) {
                return Err(Error::NotOrthogonal(
                    "extra stabilizer element is not an orthogonal pair of matrices".into(),
                ));
            }
        }
        let frame = &self.frame;
        let words: Vec<Word> = (0u64..(1u64 << (nt + k)))
            .filter(|w| {
                (w & ((1 << nt) - 1)).count_ones() as usize == p
                    && (w >> nt).count_ones() as usize == q
            })
            .collect();
        let one = Number::one();
        let mut ech: Echelon<(usize, Word)> = Echelon::new();
        // columns of the stacked operator, one per basis word
        let mut ops: Vec<Box<dyn Fn(Word) -> Form<Number> + '_>> = Vec::new();
        for x in stab {
            let mt: Mat = (0..nt)
                .map(|t| {
                    (0..nt)
                        .map(|s| {
                            (0..x.len()).fold(Number::zero(), |acc, a| acc.add(&x[a].mul(&self.ad_t[a][t][s])))
                        })
                        .collect()
                })
                .collect();
            let mv: Mat = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| {
                            (0..x.len()).fold(Number::zero(), |acc, a| acc.add(&x[a].mul(&self.rho[a][i][j])))
                        })
                        .collect()
                })
                .collect();
            let one = one.clone();
            ops.push(Box::new(move |w| {
                let images = |g: usize| -> Form<Number> {
                    let mut f = Form::zero(frame);
                    if g < nt {
                        for s in 0..nt {
                            f.add_term(1 << s, mt[s][g].clone());
                        }
                    } else if g < nt + k {
                        for j in 0..k {
                            f.add_term(1 << (nt + j), mv[j][g - nt].clone());
                        }
                    }
                    f
                };
                derive_word(frame, w, &images, &one, false)
            }));
        }
        for (gt, gv) in extras {
            let one = one.clone();
            ops.push(Box::new(move |w| {
                let images: Vec<Form<Number>> = (0..frame.len())
                    .map(|g| {
                        let mut f = Form::zero(frame);
                        if g < nt {
                            for s in 0..nt {
                                f.add_term(1 << s, gt[s][g].clone());
                            }
                        } else if g < nt + k {
                            for j in 0..k {
                                f.add_term(1 << (nt + j), gv[j][g - nt].clone());
                            }
                        }
                        f
                    })
                    .collect();
                let gw = Form::monomial(frame, w, one.clone()).substitute(frame, &images);
                gw.sub(&Form::monomial(frame, w, one.clone()))
            }));
        }
        for &w in &words {
            let mut col: SparseVec<(usize, Word)> = SparseVec::new();
            for (oi, op) in ops.iter().enumerate() {
                for (w2, c) in op(w).terms() {
                    col.insert((oi, w2), c.clone());
                }
            }
            ech.insert(&col);
        }
        Ok(words.len() - ech.rank())
    }

    /// Default generic point: the first basis vector of `V`.
    pub fn generic_fiber_point(&self) -> Vec<Number> {
        let mut v = vec![Number::zero(); self.ring.nfib()];
        if let Some(x) = v.first_mut() {
            *x = Number::one();
        }
        v
    }
}

fn check_jacobi(n: usize, c: &[Vec<Vec<Number>>]) -> Result<()> {
    let frame = Frame::new((0..n).map(|i| Generator::new("e", i + 1, Tag::Horizontal)).collect())?;
    let de: Vec<Form<Number>> = (0..n)
        .map(|i| {
            let mut f = Form::zero(&frame);
            for j in 0..n {
                for k in j + 1..n {
                    if !c[i][j][k].is_zero() {
                        f.add_term((1 << j) | (1 << k), c[i][j][k].clone());
                    }
                }
            }
            f
        })
        .collect();
    let one = Number::one();
    for i in 0..n {
        let mut dd = Form::zero(&frame);
        for (w, coef) in de[i].terms() {
            dd = dd.add(&derive_word(&frame, w, &|g| de[g].clone(), &one, true).scale(coef));
        }
        if !dd.is_zero() {
            return Err(Error::Jacobi {
                index: i + 1,
                residual: dd.to_string(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ring::RingSpec;

    /// The circle acting on the plane, over the three-dimensional algebra
    /// with de1 = -e23, de2 = e13, de3 = -e12.
    pub(crate) fn su2_setup() -> HomogeneousSetup {
        let ring = Ring::new(RingSpec {
            fiber_vars: vec!["a1".into(), "a2".into()],
            ..Default::default()
        })
        .unwrap();
        let sc = |i, j, k, v: i64| StructureConstant {
            i,
            j,
            k,
            value: Number::from_int(v),
        };
        let rot = vec![
            vec![Number::zero(), Number::from_int(-1)],
            vec![Number::from_int(1), Number::zero()],
        ];
        HomogeneousSetup::validate(SetupInput {
            ring,
            dimension: 3,
            constants: vec![sc(1, 2, 3, -1), sc(2, 1, 3, 1), sc(3, 1, 2, -1)],
            horizontal: vec![1, 2],
            gauge: vec![3],
            representation: vec![rot],
        })
        .unwrap()
    }

    #[test]
    fn vertical_frame_matches_rotation_example() {
        let s = su2_setup();
        let bs = s.build_vertical_frame();
        assert_eq!(bs[0].to_string(), "-a2*e^{3} + da^{1}");
        assert_eq!(bs[1].to_string(), "a1*e^{3} + da^{2}");
        assert_eq!(s.convention(), IndexConvention::Row);
        for b in &bs {
            assert!(s.fundamental_contraction(0, b).is_zero());
        }
    }

    #[test]
    fn connection_curvature() {
        let s = su2_setup();
        // d omega = -beta1 ∧ beta2 with omega = e^3
        let d3 = s.d_extended(&s.e(3));
        assert_eq!(d3, s.e(1).wedge(&s.e(2)).unwrap().neg());
    }

    #[test]
    fn derivative_agrees_with_pullback() {
        let s = su2_setup();
        let r = s.ring().clone();
        let a1 = Scalar::fiber(&r, 0);
        let a2 = Scalar::fiber(&r, 1);
        let tau = s.e(1).scale(&a1).add(&s.e(2).scale(&a2));
        let dtau = s.exterior_derivative(&tau).unwrap();
        assert_eq!(dtau, s.pullback_derivative(&tau));
        // d tau = sum b_i ∧ beta_i
        let expect = s.b(1).wedge(&s.e(1)).unwrap().add(&s.b(2).wedge(&s.e(2)).unwrap());
        assert_eq!(dtau, expect);
        assert!(s.exterior_derivative(&dtau).unwrap().is_zero());
    }

    #[test]
    fn basic_and_invariant() {
        let s = su2_setup();
        let r = s.ring().clone();
        assert!(s.is_basic(&s.b(1)));
        assert!(!s.is_invariant(&s.b(1)));
        let ab = s.b(1).scale(&Scalar::fiber(&r, 0)).add(&s.b(2).scale(&Scalar::fiber(&r, 1)));
        assert!(s.is_invariant(&ab));
        let da1 = Form::generator(s.raw_frame(), 3, s.one());
        assert!(!s.is_basic(&da1));
    }

    #[test]
    fn stabilizers_of_rotation() {
        let s = su2_setup();
        assert_eq!(s.stabilizer_of(&[Number::zero(), Number::zero()]).len(), 1);
        assert_eq!(s.stabilizer_of(&[Number::one(), Number::zero()]).len(), 0);
        let full = s.stabilizer_of(&[Number::zero(), Number::zero()]);
        assert_eq!(s.invariant_dimension((0, 0), &full, &[]).unwrap(), 1);
        assert_eq!(s.invariant_dimension((1, 1), &full, &[]).unwrap(), 2);
        assert_eq!(s.invariant_dimension((1, 0), &full, &[]).unwrap(), 0);
        assert_eq!(s.invariant_dimension((2, 2), &full, &[]).unwrap(), 1);
    }

    #[test]
    fn jacobi_failure_is_reported() {
        let ring = Ring::new(RingSpec::default()).unwrap();
        let sc = |i, j, k, v: i64| StructureConstant {
            i,
            j,
            k,
            value: Number::from_int(v),
        };
        // de1 = e23, de2 = e14: d(de1) = -e134
        let res = HomogeneousSetup::validate(SetupInput {
            ring,
            dimension: 4,
            constants: vec![sc(1, 2, 3, 1), sc(2, 1, 4, 1)],
            horizontal: vec![1, 2, 3, 4],
            gauge: vec![],
            representation: vec![],
        });
        assert!(matches!(res, Err(Error::Jacobi { index: 1, .. })), "{res:?}");
    }
}
