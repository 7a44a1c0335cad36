//! Concrete algebras with their modules and mode actions, plus the twisted
//! Jacobi identity in components.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::exponent::Exponent;
use crate::rational::{binomial_coeff, q, qi, Rational};
use crate::report::CheckReport;
use crate::voa::fock::{self, Sector, Series};
use crate::voa::{Form, GradedVector, Monomial, VoaError};

/// Which vertex algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VoaKind {
    /// The Heisenberg algebra `M(1)` on the space of the form.
    Heisenberg,
    /// The lattice algebra `V_L`, `L = Z alpha`, `(alpha|alpha) = 2`.
    LatticeA1,
}

/// The automorphism `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Twist {
    /// `g = 1`, order one.
    Identity,
    /// `g = theta`, order two.
    Theta,
}

/// Shared memo of `Y(a, z) v` for monomials `a`, `v`, with the largest power
/// computed so far.
#[derive(Clone, Default)]
struct SeriesCache(Arc<RwLock<SeriesMap>>);

type SeriesMap = HashMap<(Monomial, Monomial), (Exponent, Arc<Series>)>;

impl fmt::Debug for SeriesCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SeriesCache")
    }
}

impl PartialEq for SeriesCache {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for SeriesCache {}

impl SeriesCache {
    fn get(&self, form: &Form, sector: Sector, a: &Monomial, v: &Monomial, max_power: Exponent) -> Arc<Series> {
        let key = (a.clone(), v.clone());
        if let Some((p, s)) = self.0.read().expect("cache lock").get(&key) {
            if *p >= max_power {
                return s.clone();
            }
        }
        let target = max_power + Exponent::int(2);
        let s = Arc::new(fock::monomial_series(form, sector, a, v, target));
        self.0.write().expect("cache lock").insert(key, (target, s.clone()));
        s
    }
}

/// A vertex algebra together with an automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoaInstance {
    kind: VoaKind,
    twist: Twist,
    form: Form,
    adjoint_cache: SeriesCache,
}

/// Which module of a [`VoaInstance`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    /// The algebra as a module over itself.
    Adjoint,
    /// The charged Heisenberg module `M(1, lambda)`.
    Charged(Vec<Rational>),
    /// The lattice coset module `V_{L + alpha/2}`.
    HalfCoset,
    /// The `theta`-twisted Fock module; for the lattice algebra `e_alpha`
    /// acts on the bottom level by `sign`.
    Twisted {
        /// `+1` for `T_chi`, `-1` for `T_{-chi}`.
        sign: i8,
    },
}

/// A module of a vertex algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleInstance {
    voa: VoaInstance,
    kind: ModuleKind,
    cache: SeriesCache,
}

fn sq(x: &Rational) -> Rational {
    x * x
}

/// All multisets of modes with total degree `deg`, in PBW order.
fn partitions(rank: usize, step: Exponent, deg: Exponent) -> Vec<Vec<(usize, Exponent)>> {
    let mut parts: Vec<(usize, Exponent)> = Vec::new();
    let mut m = step;
    while m <= deg {
        for g in 0..rank {
            parts.push((g, -m));
        }
        m += Exponent::int(1);
    }
    parts.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut out = Vec::new();
    fn rec(parts: &[(usize, Exponent)], start: usize, left: Exponent, cur: &mut Vec<(usize, Exponent)>, out: &mut Vec<Vec<(usize, Exponent)>>) {
        if left.is_zero() {
            out.push(cur.clone());
            return;
        }
        for i in start..parts.len() {
            let (g, m) = parts[i];
            if -m <= left {
                cur.push((g, m));
                rec(parts, i, left + m, cur, out);
                cur.pop();
            }
        }
    }
    rec(&parts, 0, deg, &mut Vec::new(), &mut out);
    out
}

impl VoaInstance {
    /// Heisenberg algebra on the given space.
    pub fn heisenberg(form: Form, twist: Twist) -> Self {
        VoaInstance { kind: VoaKind::Heisenberg, twist, form, adjoint_cache: SeriesCache::default() }
    }

    /// Rank-one Heisenberg algebra with generator `a`, `(a|a) = 1`.
    pub fn heisenberg_rank_one(twist: Twist) -> Self {
        VoaInstance::heisenberg(Form::rank_one("a", qi(1)).expect("valid form"), twist)
    }

    /// The lattice algebra of `A_1` with generator `a = alpha`.
    pub fn lattice_a1(twist: Twist) -> Self {
        VoaInstance { kind: VoaKind::LatticeA1, twist, form: Form::rank_one("a", qi(2)).expect("valid form"), adjoint_cache: SeriesCache::default() }
    }

    /// The kind of algebra.
    pub fn kind(&self) -> &VoaKind {
        &self.kind
    }

    /// The automorphism.
    pub fn twist(&self) -> Twist {
        self.twist
    }

    /// The order `T` of the automorphism.
    pub fn order(&self) -> u32 {
        match self.twist {
            Twist::Identity => 1,
            Twist::Theta => 2,
        }
    }

    /// The space `h`.
    pub fn form(&self) -> &Form {
        &self.form
    }

    /// The same algebra with another automorphism.
    pub fn with_twist(&self, twist: Twist) -> Self {
        VoaInstance { twist, adjoint_cache: SeriesCache::default(), ..self.clone() }
    }

    /// A module of this algebra.
    pub fn module(&self, kind: ModuleKind) -> ModuleInstance {
        let cache = if kind == ModuleKind::Adjoint { self.adjoint_cache.clone() } else { SeriesCache::default() };
        ModuleInstance { voa: self.clone(), kind, cache }
    }

    /// The algebra as a module over itself.
    pub fn adjoint(&self) -> ModuleInstance {
        self.module(ModuleKind::Adjoint)
    }

    /// The vacuum vector.
    pub fn vacuum(&self) -> GradedVector {
        GradedVector::basis(Monomial::vacuum(self.form.rank()))
    }

    /// `h_i(-1) 1`.
    pub fn generator(&self, i: usize) -> GradedVector {
        GradedVector::basis(Monomial::vacuum(self.form.rank()).with_mode(i, Exponent::int(-1)))
    }

    /// `e^{c alpha}` for the lattice algebra (or `e^{c h_1}` in general).
    pub fn exp_state(&self, c: Rational) -> GradedVector {
        let mut label = vec![Rational::zero(); self.form.rank()];
        label[0] = c;
        GradedVector::basis(Monomial::lattice(label))
    }

    /// The conformal vector `omega = 1/2 sum_i h_i(-1) h^i(-1) 1`.
    pub fn omega(&self) -> GradedVector {
        let d = self.form.rank();
        let mut out = GradedVector::zero();
        for i in 0..d {
            for j in 0..d {
                let c = self.form.dual(i, j) / qi(2);
                let m = Monomial::vacuum(d).with_mode(i, Exponent::int(-1)).with_mode(j, Exponent::int(-1));
                out.add_term(m, c);
            }
        }
        out
    }

    /// The `L(0)`-eigenvalue of a homogeneous vector of the algebra.
    pub fn weight(&self, v: &GradedVector) -> Result<Exponent, VoaError> {
        self.adjoint().weight(v)
    }

    /// The involution `theta`: `(-1)^k` times the monomial with negated label.
    pub fn theta_involution(&self, v: &GradedVector) -> GradedVector {
        v.terms()
            .map(|(m, c)| {
                let sign = if m.length() % 2 == 0 { c.clone() } else { -c.clone() };
                (m.with_label(m.label().iter().map(|x| -x).collect()), sign)
            })
            .collect()
    }

    /// The `g`-eigencomponents `(r, v^r)` of a vector, nonzero ones only.
    pub fn split_sectors(&self, v: &GradedVector) -> Vec<(u32, GradedVector)> {
        match self.twist {
            Twist::Identity => {
                if v.is_zero() {
                    vec![]
                } else {
                    vec![(0, v.clone())]
                }
            }
            Twist::Theta => {
                let t = self.theta_involution(v);
                let half = q(1, 2);
                let plus = v.add(&t).scale(&half);
                let minus = v.sub(&t).scale(&half);
                [(0, plus), (1, minus)].into_iter().filter(|(_, x)| !x.is_zero()).collect()
            }
        }
    }

    /// The sector `r` when `v` lies in a single eigenspace `V^r`.
    pub fn sector(&self, v: &GradedVector) -> Option<u32> {
        let s = self.split_sectors(v);
        match s.len() {
            0 => Some(0),
            1 => Some(s[0].0),
            _ => None,
        }
    }

    /// Labels of the algebra with `(beta|beta)/2 <= max_weight`.
    fn labels(&self, max_weight: Exponent) -> Vec<Vec<Rational>> {
        match self.kind {
            VoaKind::Heisenberg => vec![vec![Rational::zero(); self.form.rank()]],
            VoaKind::LatticeA1 => lattice_labels(Rational::zero(), max_weight),
        }
    }

    /// Monomials of the algebra of weight `<= max_weight`.
    pub fn basis(&self, max_weight: Exponent) -> Vec<Monomial> {
        self.adjoint().basis(max_weight)
    }

    /// A spanning set of `theta`-eigenvectors, each weight-homogeneous, of
    /// weight `<= max_weight`, as `(sector, vector)` pairs.
    pub fn eigenbasis(&self, max_weight: Exponent) -> Vec<(u32, GradedVector)> {
        let mut out = Vec::new();
        for m in self.basis(max_weight) {
            let v = GradedVector::basis(m.clone());
            if self.twist == Twist::Identity {
                out.push((0, v));
                continue;
            }
            let lead = m.label().iter().find(|x| !x.is_zero());
            match lead {
                None => out.push(((m.length() % 2) as u32, v)),
                Some(x) if x.is_positive() => {
                    let t = self.theta_involution(&v);
                    out.push((0, v.add(&t)));
                    out.push((1, v.sub(&t)));
                }
                Some(_) => {}
            }
        }
        out
    }

    /// `a_{(j)} b` in the algebra.
    pub fn nth_product(&self, a: &GradedVector, j: i64, b: &GradedVector) -> GradedVector {
        self.adjoint().mode_action(a, Exponent::int(j), b).expect("integral modes are always allowed")
    }

    /// Defect of the component form of the twisted Jacobi identity on the
    /// module `m` for `a in V^r`, `b in V^s`, applied to `v`.
    ///
    /// ```text
    ///   sum_i binom(l,i) (-1)^i a_(r/T+m+l-i) b_(s/T+n+i) v
    /// - sum_i binom(l,i) (-1)^(l+i) b_(s/T+n+l-i) a_(r/T+m+i) v
    /// - sum_j binom(m+r/T, j) (a_(j+l) b)_((r+s)/T+m+n-j) v
    /// ```
    #[allow(clippy::too_many_arguments)]
    pub fn jacobi_component_defect(
        &self,
        module: &ModuleInstance,
        a: &GradedVector,
        b: &GradedVector,
        m: i64,
        n: i64,
        l: i64,
        v: &GradedVector,
    ) -> Result<GradedVector, VoaError> {
        JacobiTerms::new(self, module, a, b, v)?.defect(m, n, l)
    }

    /// Evaluates the component Jacobi defect for every pair of homogeneous
    /// eigenvectors `a`, `b` of weight `<= max_weight`, every `m`, `n`, `l`
    /// in `-range..=range` and every basis vector of `module` of degree
    /// `<= depth`.
    pub fn jacobi_sweep(&self, module: &ModuleInstance, max_weight: Exponent, range: i64, depth: Exponent) -> Result<CheckReport, VoaError> {
        let states: Vec<GradedVector> = self.eigenbasis(max_weight).into_iter().map(|(_, x)| x).collect();
        let vectors: Vec<GradedVector> = module.basis(depth).into_iter().map(GradedVector::basis).collect();
        let mut jobs = Vec::new();
        for a in &states {
            for b in &states {
                for v in &vectors {
                    jobs.push((a, b, v));
                }
            }
        }
        let counts = jobs
            .par_iter()
            .map(|(a, b, v)| {
                let mut terms = JacobiTerms::new(self, module, a, b, v)?;
                let mut r = CheckReport::new("jacobi");
                for m in -range..=range {
                    for n in -range..=range {
                        for l in -range..=range {
                            r.record(terms.defect(m, n, l)?.is_zero());
                        }
                    }
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>, VoaError>>()?;
        let mut total = CheckReport::new("jacobi");
        for r in &counts {
            total.absorb(r);
        }
        Ok(total)
    }
}

/// The terms of the component Jacobi identity for fixed `a`, `b`, `v`, with
/// every mode action memoized.
struct JacobiTerms<'a> {
    voa: &'a VoaInstance,
    module: &'a ModuleInstance,
    a: &'a GradedVector,
    b: &'a GradedVector,
    v: &'a GradedVector,
    r: Exponent,
    s: Exponent,
    bound_a: Exponent,
    bound_b: Exponent,
    top: i64,
    ab: HashMap<(Exponent, Exponent), GradedVector>,
    ba: HashMap<(Exponent, Exponent), GradedVector>,
    products: HashMap<i64, GradedVector>,
    product_modes: HashMap<(i64, Exponent), GradedVector>,
}

impl<'a> JacobiTerms<'a> {
    fn new(voa: &'a VoaInstance, module: &'a ModuleInstance, a: &'a GradedVector, b: &'a GradedVector, v: &'a GradedVector) -> Result<Self, VoaError> {
        let t = voa.order() as i64;
        let (r, s) = match (voa.sector(a), voa.sector(b)) {
            (Some(r), Some(s)) => (r as i64, s as i64),
            _ => return Err(VoaError::SectorMismatch { mode: Exponent::zero(), sectors: vec![0, 1] }),
        };
        let (r, s) = if module.is_twisted() { (r, s) } else { (0, 0) };
        let wa = voa.weight(a)?;
        let wb = voa.weight(b)?;
        Ok(JacobiTerms {
            voa,
            module,
            a,
            b,
            v,
            r: Exponent::new(r, t),
            s: Exponent::new(s, t),
            bound_a: module.truncation_bound(wa, v)?,
            bound_b: module.truncation_bound(wb, v)?,
            top: (wa + wb).ceil(),
            ab: HashMap::new(),
            ba: HashMap::new(),
            products: HashMap::new(),
            product_modes: HashMap::new(),
        })
    }

    /// `x_(p) y_(q) v`.
    fn iterated(
        module: &ModuleInstance,
        cache: &mut HashMap<(Exponent, Exponent), GradedVector>,
        x: &GradedVector,
        y: &GradedVector,
        p: Exponent,
        q: Exponent,
        v: &GradedVector,
    ) -> Result<GradedVector, VoaError> {
        if let Some(w) = cache.get(&(p, q)) {
            return Ok(w.clone());
        }
        let inner = module.mode_action(y, q, v)?;
        let w = module.mode_action(x, p, &inner)?;
        cache.insert((p, q), w.clone());
        Ok(w)
    }

    /// `(a_(k) b)_(p) v`.
    fn product_mode(&mut self, k: i64, p: Exponent) -> Result<GradedVector, VoaError> {
        if let Some(w) = self.product_modes.get(&(k, p)) {
            return Ok(w.clone());
        }
        let ab = self.products.entry(k).or_insert_with(|| self.voa.nth_product(self.a, k, self.b)).clone();
        let w = if ab.is_zero() { GradedVector::zero() } else { self.module.mode_action(&ab, p, self.v)? };
        self.product_modes.insert((k, p), w.clone());
        Ok(w)
    }

    fn defect(&mut self, m: i64, n: i64, l: i64) -> Result<GradedVector, VoaError> {
        let (rt, stt) = (self.r, self.s);
        let mut out = GradedVector::zero();
        // First sum.
        let mut i = 0i64;
        loop {
            let nb = stt + Exponent::int(n + i);
            if nb > self.bound_b {
                break;
            }
            let c = binomial_coeff(&qi(l), i as u32) * if i % 2 == 0 { qi(1) } else { qi(-1) };
            if !c.is_zero() {
                let outer = Self::iterated(self.module, &mut self.ab, self.a, self.b, rt + Exponent::int(m + l - i), nb, self.v)?;
                out.add_scaled(&outer, &c);
            }
            i += 1;
            if l >= 0 && i > l {
                break;
            }
        }
        // Second sum.
        let mut i = 0i64;
        loop {
            let na = rt + Exponent::int(m + i);
            if na > self.bound_a {
                break;
            }
            let c = binomial_coeff(&qi(l), i as u32) * if (l + i).rem_euclid(2) == 0 { qi(1) } else { qi(-1) };
            if !c.is_zero() {
                let outer = Self::iterated(self.module, &mut self.ba, self.b, self.a, stt + Exponent::int(n + l - i), na, self.v)?;
                out.add_scaled(&outer, &-c);
            }
            i += 1;
            if l >= 0 && i > l {
                break;
            }
        }
        // Right-hand side.
        let mtop = rt + Exponent::int(m);
        let mut j = 0i64;
        while j + l < self.top {
            let c = binomial_coeff(&mtop.to_rational(), j as u32);
            if !c.is_zero() {
                let w = self.product_mode(j + l, rt + stt + Exponent::int(m + n - j))?;
                out.add_scaled(&w, &-c);
            }
            j += 1;
        }
        Ok(out)
    }
}

fn lattice_labels(offset: Rational, max_weight: Exponent) -> Vec<Vec<Rational>> {
    let mw = max_weight.to_rational();
    let mut out = Vec::new();
    let mut c = -qi(max_weight.ceil() + 1);
    while c <= qi(max_weight.ceil() + 1) {
        let x = &c + &offset;
        if sq(&x) <= mw {
            out.push(vec![x]);
        }
        c += qi(1);
    }
    out.sort();
    out
}

impl ModuleInstance {
    /// The underlying algebra.
    pub fn voa(&self) -> &VoaInstance {
        &self.voa
    }

    /// The kind of module.
    pub fn kind(&self) -> &ModuleKind {
        &self.kind
    }

    /// True for twisted modules.
    pub fn is_twisted(&self) -> bool {
        matches!(self.kind, ModuleKind::Twisted { .. })
    }

    pub(crate) fn sector_kind(&self) -> Sector {
        match self.kind {
            ModuleKind::Twisted { sign } => Sector::Twisted { sign },
            _ => Sector::Untwisted,
        }
    }

    /// The conformal weight `h` (lowest `L(0)`-eigenvalue).
    pub fn conformal_weight(&self) -> Rational {
        let form = self.voa.form();
        match &self.kind {
            ModuleKind::Adjoint => Rational::zero(),
            ModuleKind::Charged(l) => form.pair(l, l) / qi(2),
            ModuleKind::HalfCoset => q(1, 4),
            ModuleKind::Twisted { .. } => q(form.rank() as i64, 16),
        }
    }

    /// Short name of the module, such as `M(1,1/2 a)` or `V_L^T+`.
    pub fn name(&self) -> String {
        let f = self.voa.form();
        match (&self.voa.kind, &self.kind) {
            (VoaKind::Heisenberg, ModuleKind::Adjoint) => "M(1)".into(),
            (VoaKind::LatticeA1, ModuleKind::Adjoint) => "V_L".into(),
            (_, ModuleKind::Charged(l)) => format!("M(1,{})", Monomial::lattice(l.clone()).render(f).trim_start_matches("e(").trim_end_matches(')')),
            (_, ModuleKind::HalfCoset) => "V_{L+a/2}".into(),
            (VoaKind::Heisenberg, ModuleKind::Twisted { .. }) => "M(1)_{Z+1/2}".into(),
            (VoaKind::LatticeA1, ModuleKind::Twisted { sign }) => format!("V_L^T{}", if *sign > 0 { "+" } else { "-" }),
        }
    }

    fn labels(&self, max_weight: Exponent) -> Vec<Vec<Rational>> {
        let d = self.voa.form().rank();
        match &self.kind {
            ModuleKind::Adjoint => self.voa.labels(max_weight),
            ModuleKind::Charged(l) => vec![l.clone()],
            ModuleKind::HalfCoset => lattice_labels(q(1, 2), max_weight),
            ModuleKind::Twisted { .. } => vec![vec![Rational::zero(); d]],
        }
    }

    /// Weight of a monomial of this module.
    pub fn monomial_weight(&self, m: &Monomial) -> Exponent {
        let extra = match self.kind {
            ModuleKind::Twisted { .. } => self.conformal_weight(),
            _ => self.voa.form().pair(m.label(), m.label()) / qi(2),
        };
        m.mode_degree() + Exponent::from_rational(&extra).expect("small weight")
    }

    /// Degree `wt - h` of a monomial.
    pub fn monomial_degree(&self, m: &Monomial) -> Exponent {
        self.monomial_weight(m) - Exponent::from_rational(&self.conformal_weight()).expect("small weight")
    }

    /// The `L(0)`-eigenvalue of a homogeneous vector.
    pub fn weight(&self, v: &GradedVector) -> Result<Exponent, VoaError> {
        let mut w = None;
        for (m, _) in v.terms() {
            let x = self.monomial_weight(m);
            match w {
                None => w = Some(x),
                Some(y) if y != x => return Err(VoaError::NotHomogeneous),
                _ => {}
            }
        }
        w.ok_or(VoaError::NotHomogeneous)
    }

    /// Degree `wt - h` of a homogeneous vector.
    pub fn degree(&self, v: &GradedVector) -> Result<Exponent, VoaError> {
        Ok(self.weight(v)? - Exponent::from_rational(&self.conformal_weight()).expect("small weight"))
    }

    /// Monomials of degree `<= max_degree`, ordered by degree then PBW order.
    pub fn basis(&self, max_degree: Exponent) -> Vec<Monomial> {
        let h = Exponent::from_rational(&self.conformal_weight()).expect("small weight");
        let step = match self.kind {
            ModuleKind::Twisted { .. } => Exponent::new(1, 2),
            _ => Exponent::int(1),
        };
        let rank = self.voa.form().rank();
        let mut out = Vec::new();
        for label in self.labels(max_degree + h) {
            let base = Monomial::lattice(label.clone());
            let lw = self.monomial_weight(&base) - h;
            let mut d = Exponent::zero();
            while lw + d <= max_degree {
                for p in partitions(rank, step, d) {
                    out.push(Monomial::new(p, label.clone()));
                }
                d += step;
            }
        }
        out.sort_by(|a, b| self.monomial_degree(a).cmp(&self.monomial_degree(b)).then(a.cmp(b)));
        out
    }

    /// Monomials of the bottom level.
    pub fn bottom(&self) -> Vec<Monomial> {
        self.basis(Exponent::zero())
    }

    /// `Y(a, z) v` truncated at `z^{max_power}`.
    pub(crate) fn vertex_series(&self, a: &GradedVector, v: &GradedVector, max_power: Exponent) -> Series {
        let mut out = Series::new();
        for (am, ac) in a.terms() {
            for (vm, vc) in v.terms() {
                let s = self.cache.get(self.voa.form(), self.sector_kind(), am, vm, max_power);
                let c = ac * vc;
                for (p, w) in s.range(..=max_power) {
                    fock::series_add(&mut out, *p, w, &c);
                }
            }
        }
        out
    }

    /// The coefficient of `z^p` in `Y(a, z) v`.
    fn coefficient(&self, a: &GradedVector, p: Exponent, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (am, ac) in a.terms() {
            for (vm, vc) in v.terms() {
                let s = self.cache.get(self.voa.form(), self.sector_kind(), am, vm, p);
                if let Some(w) = s.get(&p) {
                    out.add_scaled(w, &(ac * vc));
                }
            }
        }
        out
    }

    /// The largest mode `n` with possibly `a_(n) v != 0` for `a` of weight `wa`.
    pub fn truncation_bound(&self, wa: Exponent, v: &GradedVector) -> Result<Exponent, VoaError> {
        let mut top = None::<Exponent>;
        for (m, _) in v.terms() {
            let d = self.monomial_degree(m);
            top = Some(top.map_or(d, |t| t.max(d)));
        }
        Ok(wa - Exponent::int(1) + top.unwrap_or_else(Exponent::zero))
    }

    /// `a_(n) v` in this module.
    ///
    /// On a twisted module the modes of `a in V^r` lie in `r/2 + Z`; a source
    /// with several eigencomponents contributes through the component whose
    /// sector matches `n`.
    pub fn mode_action(&self, a: &GradedVector, n: Exponent, v: &GradedVector) -> Result<GradedVector, VoaError> {
        let t = self.voa.order() as i64;
        let component = if self.is_twisted() {
            let parts = self.voa.split_sectors(a);
            let sectors: Vec<u32> = parts.iter().map(|(r, _)| *r).collect();
            match parts.into_iter().find(|(r, _)| (n - Exponent::new(*r as i64, t)).is_integer()) {
                Some((_, x)) => x,
                None if sectors.is_empty() => return Ok(GradedVector::zero()),
                None => return Err(VoaError::SectorMismatch { mode: n, sectors }),
            }
        } else {
            if !n.is_integer() {
                return Err(VoaError::SectorMismatch { mode: n, sectors: vec![0] });
            }
            a.clone()
        };
        if component.is_zero() || v.is_zero() {
            return Ok(GradedVector::zero());
        }
        let p = -n - Exponent::int(1);
        let out = self.coefficient(&component, p, v);
        debug_assert!(self.grading_holds(&component, n, v, &out));
        Ok(out)
    }

    fn grading_holds(&self, a: &GradedVector, n: Exponent, v: &GradedVector, out: &GradedVector) -> bool {
        match (self.voa.weight(a), self.weight(v)) {
            (Ok(wa), Ok(wv)) => out.terms().all(|(m, _)| self.monomial_weight(m) == wa - n - Exponent::int(1) + wv),
            _ => true,
        }
    }

    /// All modes `a_(n) v` with `n >= n_min` (in the sector of `a`), as pairs
    /// `(n, a_(n) v)`, from one truncated series.
    pub fn modes_from(&self, a: &GradedVector, n_min: Exponent, v: &GradedVector) -> Vec<(Exponent, GradedVector)> {
        let p = -n_min - Exponent::int(1);
        self.vertex_series(a, v, p).into_iter().map(|(pw, w)| (-pw - Exponent::int(1), w)).collect()
    }

    /// The zero mode `o(a) = a_(wt a - 1)` on a vector.
    pub fn zero_mode(&self, a: &GradedVector, v: &GradedVector) -> Result<GradedVector, VoaError> {
        let mut out = GradedVector::zero();
        for (m, c) in a.terms() {
            let single = GradedVector::basis(m.clone());
            let w = self.voa.weight(&single)?;
            let n = w - Exponent::int(1);
            match self.mode_action(&single, n, v) {
                Ok(x) => out.add_scaled(&x, c),
                Err(VoaError::SectorMismatch { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// `L(-1) v = omega_(0) v`.
    pub fn l_minus_one(&self, v: &GradedVector) -> GradedVector {
        self.mode_action(&self.voa.omega(), Exponent::zero(), v).expect("omega is theta-invariant")
    }

    /// `L(0) v = omega_(1) v`.
    pub fn l_zero(&self, v: &GradedVector) -> GradedVector {
        self.mode_action(&self.voa.omega(), Exponent::int(1), v).expect("omega is theta-invariant")
    }

    /// Checks that a monomial lives in this module.
    pub fn contains(&self, m: &Monomial) -> bool {
        let w = self.monomial_weight(m);
        let h = Exponent::from_rational(&self.conformal_weight()).expect("small weight");
        if w < h {
            return false;
        }
        let step_ok = m.modes().iter().all(|(_, x)| if self.is_twisted() { !x.is_integer() && (*x * Exponent::int(2)).is_integer() } else { x.is_integer() });
        step_ok && self.labels(w).iter().any(|l| l.as_slice() == m.label())
    }

    /// Parses a monomial and checks membership.
    pub fn parse_monomial(&self, text: &str) -> Result<Monomial, VoaError> {
        let m = Monomial::parse(text, self.voa.form())?;
        if self.contains(&m) {
            Ok(m)
        } else {
            Err(VoaError::WrongSpace(text.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_commutator_on_twisted_module() {
        let v = VoaInstance::heisenberg_rank_one(Twist::Theta);
        let m = v.module(ModuleKind::Twisted { sign: 1 });
        let a = v.generator(0);
        let one = GradedVector::basis(m.bottom()[0].clone());
        let x = m.mode_action(&a, Exponent::new(-1, 2), &one).unwrap();
        let y = m.mode_action(&a, Exponent::new(1, 2), &x).unwrap();
        assert_eq!(y, one.scale(&q(1, 2)));
    }

    #[test]
    fn bottom_weight_of_twisted_module() {
        let v = VoaInstance::lattice_a1(Twist::Theta);
        let m = v.module(ModuleKind::Twisted { sign: 1 });
        let one = GradedVector::basis(m.bottom()[0].clone());
        assert_eq!(m.l_zero(&one), one.scale(&q(1, 16)));
    }

    #[test]
    fn e_zero_mode_on_twisted_bottom() {
        let v = VoaInstance::lattice_a1(Twist::Theta);
        for s in [1i8, -1] {
            let m = v.module(ModuleKind::Twisted { sign: s });
            let one = GradedVector::basis(m.bottom()[0].clone());
            let e = v.exp_state(qi(1)).add(&v.exp_state(qi(-1)));
            let x = m.mode_action(&e, Exponent::zero(), &one).unwrap();
            assert_eq!(x, one.scale(&q(s as i64, 2)));
        }
    }

    #[test]
    fn untwisted_products() {
        let v = VoaInstance::lattice_a1(Twist::Identity);
        let a = v.generator(0);
        assert_eq!(v.nth_product(&a, 1, &a), v.vacuum().scale(&qi(2)));
        let ep = v.exp_state(qi(1));
        let em = v.exp_state(qi(-1));
        assert_eq!(v.nth_product(&ep, 1, &em), v.vacuum());
        assert_eq!(v.nth_product(&ep, 0, &em), a);
        assert_eq!(v.nth_product(&a, 0, &ep), ep.scale(&qi(2)));
        for m in v.basis(Exponent::int(2)) {
            let b = GradedVector::basis(m);
            let w = v.weight(&b).unwrap().to_rational();
            assert_eq!(v.nth_product(&v.omega(), 1, &b), b.scale(&w));
        }
    }

    #[test]
    fn theta_is_an_automorphism() {
        let v = VoaInstance::lattice_a1(Twist::Theta);
        let basis: Vec<GradedVector> = v.basis(Exponent::int(1)).into_iter().map(GradedVector::basis).collect();
        for a in &basis {
            for b in &basis {
                for j in -2..2 {
                    let lhs = v.theta_involution(&v.nth_product(a, j, b));
                    let rhs = v.nth_product(&v.theta_involution(a), j, &v.theta_involution(b));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn jacobi_defect_vanishes_on_small_grid() {
        let v = VoaInstance::lattice_a1(Twist::Theta);
        let m = v.module(ModuleKind::Twisted { sign: 1 });
        let states: Vec<GradedVector> = v.eigenbasis(Exponent::int(1)).into_iter().map(|(_, x)| x).collect();
        let vs: Vec<GradedVector> = m.basis(Exponent::new(1, 2)).into_iter().map(GradedVector::basis).collect();
        for a in &states {
            for b in &states {
                for u in &vs {
                    for l in -1..=1 {
                        let d = v.jacobi_component_defect(&m, a, b, 0, -1, l, u).unwrap();
                        assert!(d.is_zero(), "{} {} {} {}", a.render(v.form()), b.render(v.form()), l, d.render(v.form()));
                    }
                }
            }
        }
    }
}
