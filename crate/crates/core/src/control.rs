//! Formation targets, the gradient and non-gradient control laws, and the
//! Jacobian-based stability check for the non-gradient law.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::{
    trivial_motion_count, weak_rigidity_rows, Configuration, Framework, Triple, TripleSet,
};
use crate::graph::Graph;
use crate::io::fmt_num;

/// Desired shape: a triple set together with a witness configuration `p*`.
/// Target values are always evaluated on the witness, so every target is realizable.
#[derive(Clone, Debug, PartialEq)]
pub struct FormationTarget {
    framework: Framework,
    triples: TripleSet,
    values: DVector<f64>,
}

impl FormationTarget {
    pub fn new(framework: Framework, triples: TripleSet) -> Result<Self> {
        let values = framework.weak_rigidity_function(&triples)?;
        Ok(FormationTarget {
            framework,
            triples,
            values,
        })
    }

    pub fn framework(&self) -> &Framework {
        &self.framework
    }

    pub fn witness(&self) -> &Configuration {
        self.framework.config()
    }

    pub fn graph(&self) -> &Graph {
        self.framework.graph()
    }

    pub fn triples(&self) -> &TripleSet {
        &self.triples
    }

    pub fn target_values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.framework.n()
    }

    pub fn d(&self) -> usize {
        self.framework.d()
    }

    /// Same triples, witness moved to `p`.
    pub fn with_witness(&self, p: Configuration) -> Result<Self> {
        FormationTarget::new(self.framework.with_config(p)?, self.triples.clone())
    }

    fn check(&self, p: &Configuration) -> Result<()> {
        if p.n() != self.n() || p.d() != self.d() {
            return Err(Error::Input(format!(
                "state has {} points in R^{}, target has {} in R^{}",
                p.n(),
                p.d(),
                self.n(),
                self.d()
            )));
        }
        Ok(())
    }

    /// `δ(p) = r(p) - r*`.
    pub fn residual(&self, p: &Configuration) -> Result<DVector<f64>> {
        self.check(p)?;
        Ok(DVector::from_iterator(
            self.triples.len(),
            self.triples
                .iter()
                .zip(self.values.iter())
                .map(|(t, v)| t.value(p) - v),
        ))
    }
}

/// Block-diagonal gain `K = diag(K_1, ..., K_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GainRepr", into = "GainRepr")]
pub struct GainMatrix {
    blocks: Vec<DMatrix<f64>>,
}

#[derive(Serialize, Deserialize)]
struct GainRepr {
    blocks: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<GainRepr> for GainMatrix {
    type Error = Error;
    fn try_from(r: GainRepr) -> Result<Self> {
        let mut blocks = Vec::with_capacity(r.blocks.len());
        for (i, rows) in r.blocks.into_iter().enumerate() {
            let d = rows.len();
            if rows.iter().any(|row| row.len() != d) {
                return Err(Error::Input(format!("gain block {} is not square", i + 1)));
            }
            blocks.push(DMatrix::from_row_iterator(d, d, rows.into_iter().flatten()));
        }
        GainMatrix::new(blocks)
    }
}

impl From<GainMatrix> for GainRepr {
    fn from(g: GainMatrix) -> Self {
        GainRepr {
            blocks: g
                .blocks
                .iter()
                .map(|b| b.row_iter().map(|r| r.iter().copied().collect()).collect())
                .collect(),
        }
    }
}

impl GainMatrix {
    pub fn new(blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::Input("gain needs at least one block".into()));
        };
        let d = first.nrows();
        for (i, b) in blocks.iter().enumerate() {
            if b.shape() != (d, d) || d == 0 {
                return Err(Error::Input(format!(
                    "gain block {} is {}x{}, expected {d}x{d}",
                    i + 1,
                    b.nrows(),
                    b.ncols()
                )));
            }
            if b.iter().any(|x| !x.is_finite()) {
                return Err(Error::Input(format!(
                    "gain block {} has non-finite entries",
                    i + 1
                )));
            }
        }
        Ok(GainMatrix { blocks })
    }

    pub fn identity(n: usize, d: usize) -> Self {
        GainMatrix {
            blocks: vec![DMatrix::identity(d, d); n],
        }
    }

    /// Diagonal blocks from `n*d` entries, agent-major.
    pub fn diagonal(d: usize, entries: &[f64]) -> Result<Self> {
        if d == 0 || entries.len() % d != 0 {
            return Err(Error::Input(
                "diagonal gain entries do not split into blocks".into(),
            ));
        }
        GainMatrix::new(
            entries
                .chunks_exact(d)
                .map(|c| DMatrix::from_diagonal(&DVector::from_column_slice(c)))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn d(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn block(&self, i: usize) -> &DMatrix<f64> {
        &self.blocks[i - 1]
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.d();
        let mut k = DMatrix::zeros(self.n() * d, self.n() * d);
        for (i, b) in self.blocks.iter().enumerate() {
            k.view_mut((i * d, i * d), (d, d)).copy_from(b);
        }
        k
    }

    /// `K v` without forming the dense matrix.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let d = self.d();
        let mut out = DVector::zeros(v.len());
        for (i, b) in self.blocks.iter().enumerate() {
            let r = b * v.rows(i * d, d);
            out.rows_mut(i * d, d).copy_from(&r);
        }
        out
    }

    fn check(&self, tgt: &FormationTarget) -> Result<()> {
        if self.n() != tgt.n() || self.d() != tgt.d() {
            return Err(Error::Input(format!(
                "gain has {} blocks of size {}, target needs {} of size {}",
                self.n(),
                self.d(),
                tgt.n(),
                tgt.d()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    Gradient,
    #[serde(alias = "non-gradient")]
    NonGradient,
}

/// A control law bound to its target (and gain, for the non-gradient law).
#[derive(Clone, Debug)]
pub struct ControllerSpec {
    law: Law,
    target: FormationTarget,
    gain: Option<GainMatrix>,
}

impl ControllerSpec {
    pub fn gradient(target: FormationTarget) -> Self {
        ControllerSpec {
            law: Law::Gradient,
            target,
            gain: None,
        }
    }

    pub fn nongradient(target: FormationTarget, gain: GainMatrix) -> Result<Self> {
        gain.check(&target)?;
        Ok(ControllerSpec {
            law: Law::NonGradient,
            target,
            gain: Some(gain),
        })
    }

    pub fn law(&self) -> Law {
        self.law
    }

    pub fn target(&self) -> &FormationTarget {
        &self.target
    }

    pub fn gain(&self) -> Option<&GainMatrix> {
        self.gain.as_ref()
    }

    pub fn velocity(&self, p: &Configuration) -> Result<DVector<f64>> {
        match &self.gain {
            None => gradient_control(p, &self.target),
            Some(k) => nongradient_control(p, &self.target, k),
        }
    }
}

/// Triples for a formation graph `gf` measured over a sensing graph `gs`:
/// angle `(i,j,k)` needs `{i,j}, {i,k}` in `gf` and `{j,k}` in `gs`.
pub fn build_formation_triples(gf: &Graph, gs: &Graph) -> Result<TripleSet> {
    if gf.n() != gs.n() {
        return Err(Error::Input(format!(
            "formation graph has {} vertices, sensing graph {}",
            gf.n(),
            gs.n()
        )));
    }
    if let Some(&(a, b)) = gf.edges().iter().find(|&&(a, b)| !gs.has_edge(a, b)) {
        return Err(Error::Input(format!(
            "formation edge {{{a},{b}}} is not sensed"
        )));
    }
    let mut set = BTreeSet::new();
    for i in 1..=gf.n() {
        let nb: Vec<usize> = gf.neighbors_unchecked(i).into_iter().collect();
        for (a, &j) in nb.iter().enumerate() {
            set.insert(Triple::distance(i, j));
            for &k in &nb[a + 1..] {
                if gs.has_edge(j, k) {
                    set.insert(Triple::new(i, j, k));
                }
            }
        }
    }
    TripleSet::new(set)
}

/// `V = ½ |δ|²`.
pub fn total_cost(p: &Configuration, tgt: &FormationTarget) -> Result<f64> {
    Ok(0.5 * tgt.residual(p)?.norm_squared())
}

/// Agent `i`'s share: angle residuals with apex `i`, distance residuals on edges at `i`.
pub fn local_cost(i: usize, p: &Configuration, tgt: &FormationTarget) -> Result<f64> {
    tgt.graph().check_vertex(i)?;
    let delta = tgt.residual(p)?;
    Ok(0.5
        * tgt
            .triples()
            .iter()
            .zip(delta.iter())
            .filter(|(t, _)| t.apex == i || (t.is_distance() && t.j == i))
            .map(|(_, x)| x * x)
            .sum::<f64>())
}

/// `u = -R_w(p)^T δ(p)`, accumulated triple by triple.
pub fn gradient_control(p: &Configuration, tgt: &FormationTarget) -> Result<DVector<f64>> {
    let delta = tgt.residual(p)?;
    let d = p.d();
    let mut u = DVector::zeros(p.n() * d);
    for (t, &dt) in tgt.triples().iter().zip(delta.iter()) {
        let eij = p.edge_vector(t.apex, t.j);
        let eik = p.edge_vector(t.apex, t.k);
        let (ci, cj, ck) = ((t.apex - 1) * d, (t.j - 1) * d, (t.k - 1) * d);
        for x in 0..d {
            u[ci + x] -= dt * (eij[x] + eik[x]);
            u[cj + x] += dt * eik[x];
            u[ck + x] += dt * eij[x];
        }
    }
    Ok(u)
}

/// `R̄_w`: distance rows as in `R_w`, angle rows restricted to the apex block,
/// so that `R̄_w^T δ` stacks the per-agent gradients of the local costs.
pub fn barred_weak_rigidity_matrix(
    p: &Configuration,
    tgt: &FormationTarget,
) -> Result<DMatrix<f64>> {
    tgt.check(p)?;
    Ok(weak_rigidity_rows(p, tgt.triples(), true))
}

/// `u = -K R̄_w(p)^T δ(p)`.
pub fn nongradient_control(
    p: &Configuration,
    tgt: &FormationTarget,
    gain: &GainMatrix,
) -> Result<DVector<f64>> {
    gain.check(tgt)?;
    let grad = barred_weak_rigidity_matrix(p, tgt)?.tr_mul(&tgt.residual(p)?);
    Ok(-gain.apply(&grad))
}

/// `J* = K R̄_w(p*)^T R_w(p*)`.
pub fn jacobian_at_target(tgt: &FormationTarget, gain: &GainMatrix) -> Result<DMatrix<f64>> {
    gain.check(tgt)?;
    let p = tgt.witness();
    let rbar = weak_rigidity_rows(p, tgt.triples(), true);
    let rw = weak_rigidity_rows(p, tgt.triples(), false);
    Ok(gain.to_dense() * rbar.transpose() * rw)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// Sorted by real part, then imaginary part, both descending.
    pub eigenvalues: Vec<Complex<f64>>,
    pub zero_tol: f64,
    pub zero_count: usize,
}

impl StabilityReport {
    /// CSV with columns `re, im`.
    pub fn eigenvalue_csv(&self) -> String {
        let mut out = String::from("re,im\n");
        for z in &self.eigenvalues {
            out.push_str(&format!("{},{}\n", fmt_num(z.re), fmt_num(z.im)));
        }
        out
    }
}

/// Descending by real part, ties broken by imaginary part.
pub fn eigen_order(a: &Complex<f64>, b: &Complex<f64>) -> Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

/// Stable: exactly `d(d+1)/2` eigenvalues within the zero tolerance and all
/// others strictly in the right half-plane. Unstable: some eigenvalue strictly
/// in the left half-plane.
pub fn classify_stability(j: &DMatrix<f64>, d: usize) -> Result<StabilityReport> {
    if !j.is_square() {
        return Err(Error::Input(format!(
            "Jacobian is {}x{}",
            j.nrows(),
            j.ncols()
        )));
    }
    let mut eigenvalues: Vec<Complex<f64>> = if j.nrows() == 0 {
        Vec::new()
    } else {
        j.complex_eigenvalues().iter().copied().collect()
    };
    eigenvalues.sort_by(eigen_order);
    let radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let zero_tol = 1e-6 * radius.max(1.0);
    let zero_count = eigenvalues.iter().filter(|z| z.norm() <= zero_tol).count();
    let verdict = if eigenvalues.iter().any(|z| z.re < -zero_tol) {
        Verdict::Unstable
    } else if zero_count == trivial_motion_count(d)
        && eigenvalues
            .iter()
            .all(|z| z.norm() <= zero_tol || z.re > zero_tol)
    {
        Verdict::Stable
    } else {
        Verdict::Marginal
    };
    Ok(StabilityReport {
        verdict,
        eigenvalues,
        zero_tol,
        zero_count,
    })
}

/// Random diagonal gains with entries uniform on `[-1.5, 1.5]`; returns the
/// first one whose Jacobian is classified stable. Trial `t` draws from the
/// generator seeded with `seed + t`.
pub fn gain_search(tgt: &FormationTarget, trials: usize, seed: u64) -> Result<Option<GainMatrix>> {
    if trials == 0 {
        return Err(Error::Input("gain search needs at least one trial".into()));
    }
    let (n, d) = (tgt.n(), tgt.d());
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let entries: Vec<f64> = (0..n * d).map(|_| rng.random_range(-1.5..=1.5)).collect();
        let k = GainMatrix::diagonal(d, &entries)?;
        let report = classify_stability(&jacobian_at_target(tgt, &k)?, d)?;
        if report.verdict == Verdict::Stable {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::triple_select::full_triple_set;

    fn moved(p: &Configuration, idx: usize, by: f64) -> Configuration {
        let mut v = p.as_slice().to_vec();
        v[idx] += by;
        Configuration::from_flat(p.d(), v).unwrap()
    }

    #[test]
    fn formation_triples_examples() {
        let tree = Graph::new(3, [(1, 2), (1, 3)]).unwrap();
        let t = build_formation_triples(&tree, &Graph::complete(3)).unwrap();
        let want = TripleSet::new([
            Triple::distance(1, 2),
            Triple::distance(1, 3),
            Triple::new(1, 2, 3),
        ])
        .unwrap();
        assert!(t.same_set(&want));

        let edge = Graph::new(2, [(1, 2)]).unwrap();
        assert_eq!(build_formation_triples(&edge, &edge).unwrap().len(), 1);

        let k3 = Graph::complete(3);
        assert_eq!(
            build_formation_triples(&k3, &k3).unwrap(),
            full_triple_set(&k3)
        );
        assert!(build_formation_triples(&k3, &tree).is_err());
    }

    #[test]
    fn costs() {
        let tgt = fixtures::hexagon_target();
        let p = tgt.witness().clone();
        assert_eq!(total_cost(&p, &tgt).unwrap(), 0.0);

        let seg = Framework::new(
            Graph::new(2, [(1, 2)]).unwrap(),
            Configuration::from_flat(1, vec![0.0, 2.0]).unwrap(),
        )
        .unwrap();
        let one =
            FormationTarget::new(seg, TripleSet::distances(&Graph::new(2, [(1, 2)]).unwrap()))
                .unwrap();
        let far = Configuration::from_flat(1, vec![0.0, 3.0]).unwrap();
        assert_eq!(total_cost(&far, &one).unwrap(), 12.5);
    }

    #[test]
    fn local_cost_is_local() {
        let tgt = fixtures::hexagon_target();
        let q = moved(tgt.witness(), 10, 0.1);
        assert!(local_cost(6, &q, &tgt).unwrap() > 0.0);
        for i in [3, 4, 5] {
            assert_eq!(local_cost(i, &q, &tgt).unwrap(), 0.0);
        }
        let sum: f64 = (1..=6).map(|i| local_cost(i, &q, &tgt).unwrap()).sum();
        assert!(sum > total_cost(&q, &tgt).unwrap());
        assert!(local_cost(7, &q, &tgt).is_err());
    }

    #[test]
    fn gradient_matches_matrix_form() {
        let tgt = fixtures::hexagon_target();
        let q = moved(&moved(tgt.witness(), 3, 0.2), 8, -0.3);
        let u = gradient_control(&q, &tgt).unwrap();
        let rw = weak_rigidity_rows(&q, tgt.triples(), false);
        let want = -rw.tr_mul(&tgt.residual(&q).unwrap());
        assert!((u - want).amax() < 1e-12);
        assert_eq!(gradient_control(tgt.witness(), &tgt).unwrap().amax(), 0.0);
    }

    #[test]
    fn all_distance_sets_make_laws_agree() {
        let tri = fixtures::right_angle_triangle(Graph::complete(3));
        let tgt = FormationTarget::new(tri.clone(), TripleSet::distances(tri.graph())).unwrap();
        let q = moved(tri.config(), 1, 0.3);
        let rbar = barred_weak_rigidity_matrix(&q, &tgt).unwrap();
        assert_eq!(rbar, weak_rigidity_rows(&q, tgt.triples(), false));
        let a = gradient_control(&q, &tgt).unwrap();
        let b = nongradient_control(&q, &tgt, &GainMatrix::identity(3, 2)).unwrap();
        assert!((a - b).amax() < 1e-14);
    }

    #[test]
    fn barred_matrix_rank_on_hexagon() {
        let tgt = fixtures::hexagon_target();
        let rbar = barred_weak_rigidity_matrix(tgt.witness(), &tgt).unwrap();
        assert_eq!(crate::linalg::numerical_rank(&rbar), 9);
    }

    #[test]
    fn hexagon_verdicts() {
        let tgt = fixtures::hexagon_target();
        let id = classify_stability(
            &jacobian_at_target(&tgt, &GainMatrix::identity(6, 2)).unwrap(),
            2,
        )
        .unwrap();
        assert_eq!(id.verdict, Verdict::Unstable);
        assert!((id.eigenvalues[0].re - 45.9712).abs() < 1e-3);
        let k = classify_stability(
            &jacobian_at_target(&tgt, &fixtures::hexagon_gain()).unwrap(),
            2,
        )
        .unwrap();
        assert_eq!(k.verdict, Verdict::Stable);
        assert!((k.eigenvalues[0].re - 48.9899).abs() < 1e-3);
        assert!(k.eigenvalue_csv().starts_with("re,im\n48.98"));
    }

    #[test]
    fn zero_matrix_is_marginal() {
        let r = classify_stability(&DMatrix::zeros(12, 12), 2).unwrap();
        assert_eq!(r.verdict, Verdict::Marginal);
        assert_eq!(r.zero_count, 12);
    }

    #[test]
    fn gain_json_shape() {
        let g: GainMatrix =
            serde_json::from_str(r#"{"blocks": [[[0.3,0],[0,-0.04]], [[1,2],[3,4]]]}"#).unwrap();
        assert_eq!(g.block(2)[(0, 1)], 2.0);
        let back: GainMatrix = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<GainMatrix>(r#"{"blocks": [[[1,0],[0]]]}"#).is_err());
        assert!(serde_json::from_str::<GainMatrix>(r#"{"blocks": []}"#).is_err());
    }

    #[test]
    fn gain_search_contract() {
        let tgt = fixtures::hexagon_target();
        assert!(gain_search(&tgt, 0, 1).is_err());
        let a = gain_search(&tgt, 50, 3).unwrap();
        assert_eq!(a, gain_search(&tgt, 50, 3).unwrap());
        if let Some(k) = a {
            let r = classify_stability(&jacobian_at_target(&tgt, &k).unwrap(), 2).unwrap();
            assert_eq!(r.verdict, Verdict::Stable);
        }
    }
}
