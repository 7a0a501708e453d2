//! Interaction-screening reconstruction of effective Ising parameters from a
//! distribution over configurations, and the three-spin coupling sweep built
//! on top of it.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};

use crate::backends::{collect_with_gauges, GaugePolicy, SamplerBackend};
use crate::dist::{kahan_sum, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::quantum::{bs_distribution, noise_averaged_distribution, QuantumChainSpec};

const GRADIENT_STOP: f64 = 1e-9;
const ITERATION_CAP: usize = 500;
const POLISH_CAP: usize = 30;
const POLISH_STOP: f64 = 1e-15;
const ARMIJO_SLOPE: f64 = 1e-4;
const SIGN_TOLERANCE: f64 = 1e-12;

/// Effective parameters seen from one node: its field and the couplings to
/// each of its neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeParams {
    node: u32,
    field: f64,
    couplings: BTreeMap<u32, f64>,
}

impl NodeParams {
    /// Builds node parameters, rejecting self-couplings and non-finite values.
    pub fn new(node: u32, field: f64, couplings: Vec<(u32, f64)>) -> Result<Self> {
        if !field.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite field on node {node}")));
        }
        let mut map = BTreeMap::new();
        for (neighbor, value) in couplings {
            if neighbor == node {
                return Err(Error::InvalidArgument(format!("self-coupling on node {node}")));
            }
            if !value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coupling ({node}, {neighbor})"
                )));
            }
            if map.insert(neighbor, value).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate coupling ({node}, {neighbor})"
                )));
            }
        }
        Ok(Self { node, field, couplings: map })
    }

    /// All-zero parameters over a fixed neighbor set.
    pub fn zeros(node: u32, neighbors: &[u32]) -> Result<Self> {
        Self::new(node, 0.0, neighbors.iter().map(|&n| (n, 0.0)).collect())
    }

    /// The node these parameters belong to.
    pub fn node(&self) -> u32 {
        self.node
    }

    /// Effective field on the node.
    pub fn field(&self) -> f64 {
        self.field
    }

    /// Effective couplings, ordered by ascending neighbor label.
    pub fn couplings(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.couplings.iter().map(|(&n, &v)| (n, v))
    }

    /// Coupling toward one neighbor, if it is in the neighbor set.
    pub fn coupling(&self, neighbor: u32) -> Option<f64> {
        self.couplings.get(&neighbor).copied()
    }

    fn theta(&self) -> DVector<f64> {
        let mut values: Vec<f64> = self.couplings.values().copied().collect();
        values.push(self.field);
        DVector::from_vec(values)
    }

    fn with_theta(&self, theta: &DVector<f64>) -> Self {
        let couplings = self
            .couplings
            .keys()
            .enumerate()
            .map(|(k, &n)| (n, theta[k]))
            .collect();
        Self { node: self.node, field: theta[theta.len() - 1], couplings }
    }
}

fn site_positions(sites: &[u32], dist: &DiscreteDistribution) -> Result<BTreeMap<u32, usize>> {
    if sites.len() != dist.n_sites() {
        return Err(Error::DimensionMismatch { left: sites.len(), right: dist.n_sites() });
    }
    let mut positions = BTreeMap::new();
    for (k, &label) in sites.iter().enumerate() {
        if positions.insert(label, k).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate site label {label}")));
        }
    }
    Ok(positions)
}

/// Per-node screening data restricted to the distribution's support.
///
/// The log objective is a log-sum-exp of functions affine in the parameters,
/// so it is convex and stays well scaled even where the plain objective's
/// curvature underflows.
struct NodeEvaluator {
    dim: usize,
    sigma_node: Vec<f64>,
    sigma_neighbors: Vec<f64>,
    log_probs: Vec<f64>,
}

impl NodeEvaluator {
    fn build(
        dist: &DiscreteDistribution,
        node_bit: usize,
        neighbor_bits: &[usize],
    ) -> Self {
        let spin = |m: usize, k: usize| -> f64 {
            if m >> k & 1 == 1 {
                1.0
            } else {
                -1.0
            }
        };
        let mut sigma_node = Vec::new();
        let mut sigma_neighbors = Vec::new();
        let mut log_probs = Vec::new();
        for (m, &p) in dist.probs().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            sigma_node.push(spin(m, node_bit));
            for &bit in neighbor_bits {
                sigma_neighbors.push(spin(m, bit));
            }
            log_probs.push(p.ln());
        }
        Self { dim: neighbor_bits.len() + 1, sigma_node, sigma_neighbors, log_probs }
    }

    fn exponents(&self, theta: &DVector<f64>) -> Vec<f64> {
        let n_neighbors = self.dim - 1;
        let field = theta[n_neighbors];
        self.log_probs
            .iter()
            .enumerate()
            .map(|(i, &lp)| {
                let mut local = field;
                for k in 0..n_neighbors {
                    local += theta[k] * self.sigma_neighbors[i * n_neighbors + k];
                }
                lp - self.sigma_node[i] * local
            })
            .collect()
    }

    /// Log objective and its gradient at `theta`.
    fn eval(&self, theta: &DVector<f64>) -> (f64, DVector<f64>) {
        let n_neighbors = self.dim - 1;
        let exponents = self.exponents(theta);
        let max_exponent = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        let mut grad = DVector::zeros(self.dim);
        for (i, &t) in exponents.iter().enumerate() {
            let w = (t - max_exponent).exp();
            total += w;
            let coeff = -self.sigma_node[i] * w;
            for k in 0..n_neighbors {
                grad[k] += coeff * self.sigma_neighbors[i * n_neighbors + k];
            }
            grad[n_neighbors] += coeff;
        }
        grad /= total;
        (max_exponent + total.ln(), grad)
    }

    /// Log objective, gradient, and exact Hessian at `theta`.
    fn eval_with_hessian(&self, theta: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n_neighbors = self.dim - 1;
        let exponents = self.exponents(theta);
        let max_exponent = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        let mut grad = DVector::zeros(self.dim);
        let mut moment = DMatrix::zeros(self.dim, self.dim);
        let mut coeffs = vec![0.0; self.dim];
        for (i, &t) in exponents.iter().enumerate() {
            let w = (t - max_exponent).exp();
            total += w;
            let su = self.sigma_node[i];
            for k in 0..n_neighbors {
                coeffs[k] = -su * self.sigma_neighbors[i * n_neighbors + k];
            }
            coeffs[n_neighbors] = -su;
            for k in 0..self.dim {
                grad[k] += w * coeffs[k];
                for l in k..self.dim {
                    moment[(k, l)] += w * coeffs[k] * coeffs[l];
                }
            }
        }
        grad /= total;
        moment /= total;
        for k in 0..self.dim {
            for l in k..self.dim {
                let h = moment[(k, l)] - grad[k] * grad[l];
                moment[(k, l)] = h;
                moment[(l, k)] = h;
            }
        }
        (max_exponent + total.ln(), grad, moment)
    }
}

struct MinimizeOutcome {
    theta: DVector<f64>,
    log_objective: f64,
    gradient_norm: f64,
    iterations: usize,
    converged: bool,
}

/// Quasi-Newton descent on the log objective to a tight gradient stop,
/// followed by exact-Hessian polish steps that push the flat directions of
/// near-degenerate inputs down to machine precision.
fn minimize(evaluator: &NodeEvaluator) -> MinimizeOutcome {
    let dim = evaluator.dim;
    let mut theta = DVector::zeros(dim);
    let (mut phi, mut grad) = evaluator.eval(&theta);
    let mut inverse_hessian = DMatrix::identity(dim, dim);
    let mut iterations = 0;
    let mut converged = grad.amax() <= GRADIENT_STOP;

    while !converged && iterations < ITERATION_CAP {
        let mut direction = -(&inverse_hessian * &grad);
        let mut slope = direction.dot(&grad);
        if slope >= 0.0 {
            inverse_hessian = DMatrix::identity(dim, dim);
            direction = -grad.clone();
            slope = -grad.dot(&grad);
        }

        let mut step = 1.0;
        let mut accepted = None;
        while step >= 1e-18 {
            let candidate = &theta + &direction * step;
            let (phi_new, grad_new) = evaluator.eval(&candidate);
            if phi_new <= phi + ARMIJO_SLOPE * step * slope {
                accepted = Some((candidate, phi_new, grad_new));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, phi_new, grad_new)) = accepted else {
            break;
        };

        let displacement = &candidate - &theta;
        let grad_change = &grad_new - &grad;
        let curvature = displacement.dot(&grad_change);
        if curvature > 1e-14 * displacement.norm() * grad_change.norm() {
            let rho = 1.0 / curvature;
            let left = DMatrix::identity(dim, dim) - rho * (&displacement * grad_change.transpose());
            inverse_hessian = &left * inverse_hessian * left.transpose()
                + rho * (&displacement * displacement.transpose());
        }

        theta = candidate;
        phi = phi_new;
        grad = grad_new;
        iterations += 1;
        converged = grad.amax() <= GRADIENT_STOP;
    }

    for _ in 0..POLISH_CAP {
        let (_, current_grad, hessian) = evaluator.eval_with_hessian(&theta);
        let gradient_norm = current_grad.amax();
        if gradient_norm < POLISH_STOP {
            break;
        }
        let rhs = -current_grad.clone();
        let direction = match hessian.clone().cholesky() {
            Some(factor) => factor.solve(&rhs),
            None => match hessian.lu().solve(&rhs) {
                Some(solution) => solution,
                None => break,
            },
        };
        let mut improved = false;
        let mut step = 1.0;
        for _ in 0..6 {
            let candidate = &theta + &direction * step;
            let (phi_new, grad_new) = evaluator.eval(&candidate);
            if grad_new.amax() < gradient_norm {
                theta = candidate;
                phi = phi_new;
                grad = grad_new;
                iterations += 1;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }

    let gradient_norm = grad.amax();
    MinimizeOutcome {
        theta,
        log_objective: phi,
        gradient_norm,
        iterations,
        converged: gradient_norm <= GRADIENT_STOP,
    }
}

fn check_params(
    params: &NodeParams,
    positions: &BTreeMap<u32, usize>,
) -> Result<(usize, Vec<usize>)> {
    let node_bit = *positions
        .get(&params.node)
        .ok_or_else(|| Error::InvalidArgument(format!("node {} not in site list", params.node)))?;
    let neighbor_bits = params
        .couplings
        .keys()
        .map(|neighbor| {
            positions.get(neighbor).copied().ok_or_else(|| {
                Error::InvalidArgument(format!("neighbor {neighbor} not in site list"))
            })
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok((node_bit, neighbor_bits))
}

/// The screening objective `S = E[exp(-s_u (sum_j J_uj s_j + h_u))]` under
/// `dist`, with expectations over the configuration law.
pub fn iso_objective(
    params: &NodeParams,
    sites: &[u32],
    dist: &DiscreteDistribution,
) -> Result<f64> {
    let positions = site_positions(sites, dist)?;
    let (node_bit, neighbor_bits) = check_params(params, &positions)?;
    let theta = params.theta();
    let spin = |m: usize, k: usize| -> f64 {
        if m >> k & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    };
    Ok(kahan_sum(dist.probs().iter().enumerate().map(|(m, &p)| {
        if p == 0.0 {
            return 0.0;
        }
        let mut local = params.field;
        for (k, &bit) in neighbor_bits.iter().enumerate() {
            local += theta[k] * spin(m, bit);
        }
        p * (-spin(m, node_bit) * local).exp()
    })))
}

/// Analytic gradient of [`iso_objective`], ordered by ascending neighbor
/// label with the field derivative last. Component `k` for a neighbor `j` is
/// `E[-s_u s_j exp(-s_u L_u)]`; the field component is `E[-s_u exp(-s_u L_u)]`.
pub fn iso_gradient(
    params: &NodeParams,
    sites: &[u32],
    dist: &DiscreteDistribution,
) -> Result<Vec<f64>> {
    let positions = site_positions(sites, dist)?;
    let (node_bit, neighbor_bits) = check_params(params, &positions)?;
    let theta = params.theta();
    let dim = neighbor_bits.len() + 1;
    let spin = |m: usize, k: usize| -> f64 {
        if m >> k & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    };
    let mut grad = vec![0.0; dim];
    for (m, &p) in dist.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut local = params.field;
        for (k, &bit) in neighbor_bits.iter().enumerate() {
            local += theta[k] * spin(m, bit);
        }
        let su = spin(m, node_bit);
        let weight = p * (-su * local).exp();
        for (k, &bit) in neighbor_bits.iter().enumerate() {
            grad[k] -= weight * su * spin(m, bit);
        }
        grad[dim - 1] -= weight * su;
    }
    Ok(grad)
}

/// Screening outcome for one node.
#[derive(Debug, Clone)]
pub struct NodeResult {
    /// Recovered parameters at the optimizer's final iterate.
    pub params: NodeParams,
    /// Screening objective value at the final iterate.
    pub objective: f64,
    /// Max-norm of the log-objective gradient at the final iterate.
    pub gradient_norm: f64,
    /// Total descent and polish iterations spent.
    pub iterations: usize,
    /// Whether the gradient stop was reached before the iteration cap.
    pub converged: bool,
}

/// Full reconstruction: per-node results plus the symmetrized parameter maps.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    /// Per-node outcomes, in site order.
    pub nodes: Vec<NodeResult>,
    /// Symmetrized couplings keyed by (smaller label, larger label).
    pub couplings: BTreeMap<(u32, u32), f64>,
    /// Recovered fields keyed by site label.
    pub fields: BTreeMap<u32, f64>,
    /// Largest disagreement between the two directed estimates of any edge.
    pub max_asymmetry: f64,
}

impl ReconstructionResult {
    /// Symmetrized coupling for an edge, in either label order.
    pub fn coupling(&self, a: u32, b: u32) -> Option<f64> {
        self.couplings.get(&(a.min(b), a.max(b))).copied()
    }

    /// Recovered field on a site.
    pub fn field(&self, a: u32) -> Option<f64> {
        self.fields.get(&a).copied()
    }

    /// True when every node's minimization reached its gradient stop.
    pub fn all_converged(&self) -> bool {
        self.nodes.iter().all(|node| node.converged)
    }
}

/// Reconstructs effective parameters from a distribution by independent
/// per-node screening minimizations, then symmetrizes the directed coupling
/// estimates by their arithmetic mean. The support defaults to the complete
/// graph over `sites`.
pub fn reconstruct(
    dist: &DiscreteDistribution,
    sites: &[u32],
    support: Option<&[(u32, u32)]>,
) -> Result<ReconstructionResult> {
    let positions = site_positions(sites, dist)?;
    let mut neighbor_sets: BTreeMap<u32, BTreeSet<u32>> =
        sites.iter().map(|&s| (s, BTreeSet::new())).collect();
    match support {
        Some(edges) => {
            for &(a, b) in edges {
                if a == b {
                    return Err(Error::InvalidArgument(format!("self-edge on site {a}")));
                }
                if !positions.contains_key(&a) || !positions.contains_key(&b) {
                    return Err(Error::InvalidArgument(format!(
                        "support edge ({a}, {b}) leaves the site list"
                    )));
                }
                neighbor_sets.get_mut(&a).expect("site present").insert(b);
                neighbor_sets.get_mut(&b).expect("site present").insert(a);
            }
        }
        None => {
            for &a in sites {
                for &b in sites {
                    if a != b {
                        neighbor_sets.get_mut(&a).expect("site present").insert(b);
                    }
                }
            }
        }
    }

    let mut nodes = Vec::with_capacity(sites.len());
    for &node in sites {
        let neighbors: Vec<u32> = neighbor_sets[&node].iter().copied().collect();
        let neighbor_bits: Vec<usize> = neighbors.iter().map(|n| positions[n]).collect();
        let evaluator = NodeEvaluator::build(dist, positions[&node], &neighbor_bits);
        let outcome = minimize(&evaluator);
        let params = NodeParams::zeros(node, &neighbors)?.with_theta(&outcome.theta);
        nodes.push(NodeResult {
            params,
            objective: outcome.log_objective.exp(),
            gradient_norm: outcome.gradient_norm,
            iterations: outcome.iterations,
            converged: outcome.converged,
        });
    }

    let by_node: BTreeMap<u32, &NodeResult> =
        nodes.iter().map(|result| (result.params.node, result)).collect();
    let mut couplings = BTreeMap::new();
    let mut max_asymmetry = 0.0f64;
    for (&node, neighbors) in &neighbor_sets {
        for &neighbor in neighbors {
            if neighbor <= node {
                continue;
            }
            let forward = by_node[&node].params.coupling(neighbor).expect("edge in support");
            let backward = by_node[&neighbor].params.coupling(node).expect("edge in support");
            max_asymmetry = max_asymmetry.max((forward - backward).abs());
            couplings.insert((node, neighbor), 0.5 * (forward + backward));
        }
    }
    let fields = nodes
        .iter()
        .map(|result| (result.params.node, result.params.field))
        .collect();

    Ok(ReconstructionResult { nodes, couplings, fields, max_asymmetry })
}

/// Where the three-spin sweep's distributions come from.
pub enum SweepSource<'a> {
    /// Exact noise-averaged transverse-field chain at each grid coupling.
    NoiseAveraged { beta: f64, gamma: f64, eta: f64 },
    /// Exact background-susceptibility law at each grid coupling.
    BackgroundSusceptibility { beta: f64, chi: f64 },
    /// Gauge-cycled empirical estimate from a sampler backend.
    Sampled {
        backend: &'a dyn SamplerBackend,
        total_samples: usize,
        batch_size: usize,
        anneal_time_label: String,
        seed: u64,
    },
}

/// One sweep row: the programmed coupling and the three recovered couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub j_in: f64,
    pub j12: f64,
    pub j23: f64,
    pub j13: f64,
}

/// Sweeps the programmed chain coupling across `j_grid`, reconstructing the
/// effective couplings of a three-spin chain from each source distribution.
pub fn three_spin_sweep(j_grid: &[f64], source: &SweepSource) -> Result<Vec<SweepRow>> {
    let sites = [0u32, 1, 2];
    let mut rows = Vec::with_capacity(j_grid.len());
    for (index, &j_in) in j_grid.iter().enumerate() {
        let dist = match source {
            SweepSource::NoiseAveraged { beta, gamma, eta } => {
                let spec = QuantumChainSpec::chain(3, j_in, *beta)?
                    .with_uniform_transverse(*gamma)?
                    .with_uniform_noise(*eta)?;
                noise_averaged_distribution(&spec)?
            }
            SweepSource::BackgroundSusceptibility { beta, chi } => {
                bs_distribution(j_in, *chi, *beta)?
            }
            SweepSource::Sampled {
                backend,
                total_samples,
                batch_size,
                anneal_time_label,
                seed,
            } => {
                let model = IsingModel::chain(3, j_in)?;
                let point_seed = seed.wrapping_add((index as u64) << 32);
                let set = collect_with_gauges(
                    *backend,
                    &model,
                    *total_samples,
                    *batch_size,
                    anneal_time_label,
                    point_seed,
                    &GaugePolicy::Random,
                )?;
                set.empirical()?
            }
        };
        let result = reconstruct(&dist, &sites, None)?;
        rows.push(SweepRow {
            j_in,
            j12: result.coupling(0, 1).expect("complete support"),
            j23: result.coupling(1, 2).expect("complete support"),
            j13: result.coupling(0, 2).expect("complete support"),
        });
    }
    Ok(rows)
}

/// Location of the first sign change of the recovered end-to-end coupling,
/// by linear interpolation between the bracketing grid points. Values within
/// 1e-12 of zero are treated as zero and never bracket a crossing.
pub fn zero_crossing(rows: &[SweepRow]) -> Option<f64> {
    for window in rows.windows(2) {
        let (a, b) = (window[0], window[1]);
        let opposite = (a.j13 < -SIGN_TOLERANCE && b.j13 > SIGN_TOLERANCE)
            || (a.j13 > SIGN_TOLERANCE && b.j13 < -SIGN_TOLERANCE);
        if opposite {
            let fraction = -a.j13 / (b.j13 - a.j13);
            return Some(a.j_in + fraction * (b.j_in - a.j_in));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_distribution(n_sites: usize, seed: u64) -> DiscreteDistribution {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = 1usize << n_sites;
        let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        DiscreteDistribution::new(n_sites, raw.into_iter().map(|x| x / sum).collect()).unwrap()
    }

    fn four_spin_model() -> IsingModel {
        IsingModel::new(
            vec![0, 1, 2, 3],
            vec![
                (0, 1, 1.0),
                (0, 2, -1.0),
                (0, 3, 1.0),
                (1, 2, 1.0),
                (1, 3, -1.0),
                (2, 3, 1.0),
            ],
            vec![(0, 1.0), (1, -1.0), (2, 1.0), (3, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn objective_is_one_at_zero_parameters() {
        let dist = random_distribution(3, 4);
        let params = NodeParams::zeros(1, &[0, 2]).unwrap();
        let value = iso_objective(&params, &[0, 1, 2], &dist).unwrap();
        assert!((value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lone_node_objective_is_cosh_of_the_field() {
        let dist = DiscreteDistribution::uniform(1).unwrap();
        for field in [-1.0, 0.3, 2.0] {
            let params = NodeParams::new(0, field, vec![]).unwrap();
            let value = iso_objective(&params, &[0], &dist).unwrap();
            assert!((value - field.cosh()).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_at_zero_is_minus_the_correlations() {
        let dist = random_distribution(3, 9);
        let params = NodeParams::zeros(0, &[1, 2]).unwrap();
        let grad = iso_gradient(&params, &[0, 1, 2], &dist).unwrap();
        let spin = |m: usize, k: usize| if m >> k & 1 == 1 { 1.0 } else { -1.0 };
        let correlation01 = dist.expectation(|m| spin(m, 0) * spin(m, 1));
        let correlation02 = dist.expectation(|m| spin(m, 0) * spin(m, 2));
        let magnetization0 = dist.expectation(|m| spin(m, 0));
        assert!((grad[0] + correlation01).abs() < 1e-12);
        assert!((grad[1] + correlation02).abs() < 1e-12);
        assert!((grad[2] + magnetization0).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let dist = random_distribution(3, 5);
        let sites = [0u32, 1, 2];
        let params = NodeParams::new(1, 0.3, vec![(0, -0.6), (2, 0.9)]).unwrap();
        let grad = iso_gradient(&params, &sites, &dist).unwrap();

        let step = 1e-5;
        let perturbed = |k: usize, delta: f64| -> NodeParams {
            let mut couplings: Vec<(u32, f64)> = params.couplings().collect();
            let mut field = params.field();
            if k < couplings.len() {
                couplings[k].1 += delta;
            } else {
                field += delta;
            }
            NodeParams::new(1, field, couplings).unwrap()
        };
        for k in 0..3 {
            let plus = iso_objective(&perturbed(k, step), &sites, &dist).unwrap();
            let minus = iso_objective(&perturbed(k, -step), &sites, &dist).unwrap();
            let numeric = (plus - minus) / (2.0 * step);
            let relative = (grad[k] - numeric).abs() / numeric.abs().max(1.0);
            assert!(relative < 1e-6, "component {k}: {} vs {numeric}", grad[k]);
        }
    }

    #[test]
    fn gradient_vanishes_at_the_scaled_true_parameters() {
        let model = IsingModel::new(
            vec![0, 1, 2],
            vec![(0, 1, 0.9), (1, 2, -0.7)],
            vec![(0, 0.2), (1, -0.4), (2, 0.5)],
        )
        .unwrap();
        let alpha = 0.8;
        let dist = model.enumerate_gibbs(alpha).unwrap();
        let params = NodeParams::new(
            1,
            alpha * -0.4,
            vec![(0, alpha * 0.9), (2, alpha * -0.7)],
        )
        .unwrap();
        let grad = iso_gradient(&params, &[0, 1, 2], &dist).unwrap();
        for component in grad {
            assert!(component.abs() < 1e-8, "stationarity violated: {component}");
        }
    }

    #[test]
    fn objective_is_convex_along_random_segments() {
        let dist = random_distribution(3, 21);
        let sites = [0u32, 1, 2];
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let draw = |rng: &mut ChaCha8Rng| {
                NodeParams::new(
                    0,
                    rng.gen_range(-1.5..1.5),
                    vec![(1, rng.gen_range(-1.5..1.5)), (2, rng.gen_range(-1.5..1.5))],
                )
                .unwrap()
            };
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            let mid = NodeParams::new(
                0,
                0.5 * (a.field() + b.field()),
                vec![
                    (1, 0.5 * (a.coupling(1).unwrap() + b.coupling(1).unwrap())),
                    (2, 0.5 * (a.coupling(2).unwrap() + b.coupling(2).unwrap())),
                ],
            )
            .unwrap();
            let s_a = iso_objective(&a, &sites, &dist).unwrap();
            let s_b = iso_objective(&b, &sites, &dist).unwrap();
            let s_mid = iso_objective(&mid, &sites, &dist).unwrap();
            assert!(s_mid <= 0.5 * (s_a + s_b) + 1e-12);
        }
    }

    #[test]
    fn uniform_input_reconstructs_to_zero_parameters() {
        let dist = DiscreteDistribution::uniform(3).unwrap();
        let result = reconstruct(&dist, &[0, 1, 2], None).unwrap();
        assert!(result.all_converged());
        for (_, value) in &result.couplings {
            assert!(value.abs() < 1e-9);
        }
        for (_, value) in &result.fields {
            assert!(value.abs() < 1e-9);
        }
    }

    #[test]
    fn screening_recovers_scaled_parameters_from_exact_gibbs() {
        let model = four_spin_model();
        let alpha = 0.3;
        let dist = model.enumerate_gibbs(alpha).unwrap();
        let result = reconstruct(&dist, model.sites(), None).unwrap();
        assert!(result.all_converged());
        assert!(result.max_asymmetry < 1e-6);
        for ((a, b), value) in model.couplings() {
            let recovered = result.coupling(a, b).unwrap();
            assert!(
                (recovered - alpha * value).abs() < 1e-6,
                "edge ({a}, {b}): {recovered} vs {}",
                alpha * value
            );
        }
        for (a, value) in model.fields() {
            let recovered = result.field(a).unwrap();
            assert!((recovered - alpha * value).abs() < 1e-6);
        }
    }

    #[test]
    fn restricted_support_is_respected() {
        let dist = four_spin_model().enumerate_gibbs(0.2).unwrap();
        let support = [(0u32, 1u32), (2, 3)];
        let result = reconstruct(&dist, &[0, 1, 2, 3], Some(&support)).unwrap();
        assert_eq!(result.couplings.len(), 2);
        assert!(result.coupling(0, 2).is_none());
    }

    #[test]
    fn reconstruction_is_gauge_equivariant() {
        let model = four_spin_model();
        let dist = model.enumerate_gibbs(0.25).unwrap();
        let base = reconstruct(&dist, model.sites(), None).unwrap();

        let gauge = crate::ising::GaugeVector::new(vec![1, -1, 1, -1]).unwrap();
        let transformed_dist = model
            .gauge_transform(&gauge)
            .unwrap()
            .enumerate_gibbs(0.25)
            .unwrap();
        let transformed = reconstruct(&transformed_dist, model.sites(), None).unwrap();

        for ((a, b), value) in &base.couplings {
            let sign = f64::from(gauge.sign(*a as usize) * gauge.sign(*b as usize));
            let expected = sign * value;
            let got = transformed.coupling(*a, *b).unwrap();
            assert!((got - expected).abs() < 1e-6, "edge ({a}, {b})");
        }
        for (a, value) in &base.fields {
            let expected = f64::from(gauge.sign(*a as usize)) * value;
            let got = transformed.field(*a).unwrap();
            assert!((got - expected).abs() < 1e-6);
        }
    }

    #[test]
    fn end_coupling_of_the_susceptibility_law_is_recovered_exactly() {
        let dist = bs_distribution(0.5, 0.05, 11.0).unwrap();
        let result = reconstruct(&dist, &[0, 1, 2], None).unwrap();
        let recovered = result.coupling(0, 2).unwrap();
        assert!((recovered - 0.1375).abs() < 1e-6, "recovered {recovered}");
    }

    #[test]
    fn noise_averaged_end_coupling_changes_sign_across_the_sweep() {
        let source = SweepSource::NoiseAveraged { beta: 11.0, gamma: 0.013, eta: 0.04 };
        let rows = three_spin_sweep(&[0.1, 0.5], &source).unwrap();
        assert!(rows[0].j13 < 0.0, "j13 at 0.1: {}", rows[0].j13);
        assert!(rows[1].j13 > 0.0, "j13 at 0.5: {}", rows[1].j13);
    }

    #[test]
    fn susceptibility_sweep_never_changes_sign() {
        let source = SweepSource::BackgroundSusceptibility { beta: 11.0, chi: 0.05 };
        let rows = three_spin_sweep(&[0.0, 0.25, 0.5, 1.0], &source).unwrap();
        for row in &rows {
            assert!(row.j13 > -1e-9, "j13 at {}: {}", row.j_in, row.j13);
        }
        assert_eq!(zero_crossing(&rows), None);
    }

    #[test]
    fn crossing_is_located_by_linear_interpolation() {
        let rows: Vec<SweepRow> = [0.0, 0.2, 0.4]
            .iter()
            .map(|&j| SweepRow { j_in: j, j12: 0.0, j23: 0.0, j13: j - 0.3 })
            .collect();
        let crossing = zero_crossing(&rows).unwrap();
        assert!((crossing - 0.3).abs() < 1e-12);

        let flat: Vec<SweepRow> = [0.0, 0.5]
            .iter()
            .map(|&j| SweepRow { j_in: j, j12: 0.0, j23: 0.0, j13: 0.0 })
            .collect();
        assert_eq!(zero_crossing(&flat), None);
    }
}
