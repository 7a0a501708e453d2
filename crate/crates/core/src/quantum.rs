//! Dense real-symmetric Hamiltonians for small transverse-field Ising chains,
//! their thermal states, the noise-averaged chain distribution, and the
//! background-susceptibility baseline.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::dist::{kahan_sum, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::ising::IsingModel;

/// Largest qubit count accepted for dense diagonalization (1024 x 1024).
pub const QUANTUM_CAP: usize = 10;

const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Parameters of a transverse-field Ising chain with per-qubit binary noise:
/// couplings scale with `j_in`, each qubit `i` carries a transverse term
/// `gamma_i * j_in` and a noise field of amplitude `eta_i` whose sign is
/// chosen per realization.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChainSpec {
    n_qubits: usize,
    couplings: Vec<(usize, usize, f64)>,
    j_in: f64,
    transverse_scale: Vec<f64>,
    noise_amplitude: Vec<f64>,
    beta: f64,
    absolute_transverse: bool,
}

impl QuantumChainSpec {
    /// Builds a spec from explicit per-edge weights (multiplied by `j_in`)
    /// and per-qubit transverse and noise amplitudes.
    pub fn new(
        n_qubits: usize,
        couplings: Vec<(usize, usize, f64)>,
        j_in: f64,
        transverse_scale: Vec<f64>,
        noise_amplitude: Vec<f64>,
        beta: f64,
    ) -> Result<Self> {
        if n_qubits == 0 || n_qubits > QUANTUM_CAP {
            return Err(Error::Capacity { sites: n_qubits, limit: QUANTUM_CAP });
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "inverse temperature must be positive, got {beta}"
            )));
        }
        if !j_in.is_finite() {
            return Err(Error::InvalidArgument("coupling scale must be finite".into()));
        }
        for &(i, j, w) in &couplings {
            if i == j || i >= n_qubits || j >= n_qubits || !w.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "bad coupling ({i}, {j}, {w}) for {n_qubits} qubits"
                )));
            }
        }
        for (name, values) in [("transverse", &transverse_scale), ("noise", &noise_amplitude)] {
            if values.len() != n_qubits {
                return Err(Error::DimensionMismatch { left: n_qubits, right: values.len() });
            }
            if values.iter().any(|&v| !v.is_finite() || v < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} amplitudes must be finite and non-negative"
                )));
            }
        }
        Ok(Self {
            n_qubits,
            couplings,
            j_in,
            transverse_scale,
            noise_amplitude,
            beta,
            absolute_transverse: false,
        })
    }

    /// A linear chain of `n` qubits with unit edge weights and no transverse
    /// or noise terms.
    pub fn chain(n: usize, j_in: f64, beta: f64) -> Result<Self> {
        let couplings = (0..n.saturating_sub(1)).map(|i| (i, i + 1, 1.0)).collect();
        Self::new(n, couplings, j_in, vec![0.0; n], vec![0.0; n], beta)
    }

    /// Sets every qubit's transverse scale to `gamma`.
    pub fn with_uniform_transverse(mut self, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidArgument(format!("bad transverse scale {gamma}")));
        }
        self.transverse_scale = vec![gamma; self.n_qubits];
        Ok(self)
    }

    /// Sets every qubit's noise amplitude to `eta`.
    pub fn with_uniform_noise(mut self, eta: f64) -> Result<Self> {
        if !eta.is_finite() || eta < 0.0 {
            return Err(Error::InvalidArgument(format!("bad noise amplitude {eta}")));
        }
        self.noise_amplitude = vec![eta; self.n_qubits];
        Ok(self)
    }

    /// Treats transverse amplitudes as absolute instead of multiples of
    /// `j_in`. Off by default.
    pub fn with_absolute_transverse(mut self, absolute: bool) -> Self {
        self.absolute_transverse = absolute;
        self
    }

    /// Number of qubits.
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Coupling scale shared by every edge.
    pub fn j_in(&self) -> f64 {
        self.j_in
    }

    /// Inverse temperature used for thermal states of this chain.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The classical part of the chain as an Ising model over sites `0..n`.
    pub fn classical_model(&self) -> IsingModel {
        let sites: Vec<u32> = (0..self.n_qubits as u32).collect();
        let couplings = self
            .couplings
            .iter()
            .map(|&(i, j, w)| (i as u32, j as u32, w * self.j_in))
            .collect();
        IsingModel::new(sites, couplings, Vec::new())
            .expect("validated spec produces a valid model")
    }
}

/// A real symmetric operator on `n` qubits, stored dense.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    n_qubits: usize,
    matrix: DMatrix<f64>,
}

impl HermitianOperator {
    /// Validates symmetry and power-of-two dimension, then wraps the matrix.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "operator must be square with power-of-two dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut max_asymmetry = 0.0f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                max_asymmetry = max_asymmetry.max((matrix[(i, j)] - matrix[(j, i)]).abs());
            }
        }
        if max_asymmetry > HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian { max_asymmetry });
        }
        let n_qubits = dim.trailing_zeros() as usize;
        Ok(Self { n_qubits, matrix })
    }

    /// Number of qubits.
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Matrix dimension `2^n`.
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// The operator shifted by a multiple of the identity.
    pub fn shifted(&self, offset: f64) -> Self {
        let mut matrix = self.matrix.clone();
        for i in 0..matrix.nrows() {
            matrix[(i, i)] += offset;
        }
        Self { n_qubits: self.n_qubits, matrix }
    }
}

/// Builds the chain Hamiltonian for one noise-sign realization:
/// `H = -sum_ij w_ij j_in Z_i Z_j - sum_i gamma_i j_in X_i - sum_i eta_i s_i Z_i`,
/// where `Z_k` is diagonal with entry `s_k(m)` and `X_k` flips bit `k`.
pub fn build_noise_hamiltonian(
    spec: &QuantumChainSpec,
    signs: &[i8],
) -> Result<HermitianOperator> {
    let n = spec.n_qubits;
    if signs.len() != n {
        return Err(Error::CoverageMismatch { expected: n, got: signs.len() });
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::InvalidArgument("noise signs must be -1 or +1".into()));
    }
    let dim = 1usize << n;
    let mut matrix = DMatrix::zeros(dim, dim);

    let spin = |m: usize, k: usize| -> f64 {
        if m >> k & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    };
    for m in 0..dim {
        let mut diagonal = 0.0;
        for &(i, j, w) in &spec.couplings {
            diagonal -= w * spec.j_in * spin(m, i) * spin(m, j);
        }
        for k in 0..n {
            diagonal -= spec.noise_amplitude[k] * f64::from(signs[k]) * spin(m, k);
        }
        matrix[(m, m)] = diagonal;
    }

    for k in 0..n {
        let strength = if spec.absolute_transverse {
            spec.transverse_scale[k]
        } else {
            spec.transverse_scale[k] * spec.j_in
        };
        if strength == 0.0 {
            continue;
        }
        for m in 0..dim {
            matrix[(m ^ (1 << k), m)] -= strength;
        }
    }

    HermitianOperator::new(matrix)
}

/// The computational-basis diagonal of `exp(-beta H) / Z`, computed by
/// eigendecomposition with the spectrum shifted for overflow safety.
pub fn thermal_distribution(
    operator: &HermitianOperator,
    beta: f64,
) -> Result<DiscreteDistribution> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "inverse temperature must be non-negative, got {beta}"
        )));
    }
    let dim = operator.dimension();
    let eigen = SymmetricEigen::new(operator.matrix.clone());
    let lambda_min = eigen.eigenvalues.min();
    let weights: Vec<f64> = eigen
        .eigenvalues
        .iter()
        .map(|&lambda| (-beta * (lambda - lambda_min)).exp())
        .collect();

    let mut probs = vec![0.0; dim];
    for (k, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let column = eigen.eigenvectors.column(k);
        for m in 0..dim {
            probs[m] += column[m] * column[m] * w;
        }
    }
    let norm = kahan_sum(probs.iter().copied());
    for p in &mut probs {
        *p /= norm;
    }
    let residual = kahan_sum(probs.iter().copied());
    for p in &mut probs {
        *p /= residual;
    }
    DiscreteDistribution::new(operator.n_qubits(), probs)
}

/// The thermal distribution averaged uniformly over all `2^n` noise-sign
/// realizations of the chain.
pub fn noise_averaged_distribution(spec: &QuantumChainSpec) -> Result<DiscreteDistribution> {
    let n = spec.n_qubits;
    let patterns = 1usize << n;
    let dim = 1usize << n;
    let mut sum = vec![0.0; dim];
    for pattern in 0..patterns {
        let signs: Vec<i8> = (0..n)
            .map(|k| if pattern >> k & 1 == 1 { 1 } else { -1 })
            .collect();
        let operator = build_noise_hamiltonian(spec, &signs)?;
        let thermal = thermal_distribution(&operator, spec.beta)?;
        for (acc, &p) in sum.iter_mut().zip(thermal.probs()) {
            *acc += p;
        }
    }
    let scale = patterns as f64;
    DiscreteDistribution::new(n, sum.into_iter().map(|p| p / scale).collect())
}

/// The three-spin chain with a parasitic end-to-end coupling `chi * j_in^2`,
/// the background-susceptibility baseline.
pub fn bs_model(j_in: f64, chi: f64) -> Result<IsingModel> {
    if !j_in.is_finite() || !chi.is_finite() {
        return Err(Error::InvalidArgument("background-susceptibility parameters must be finite".into()));
    }
    IsingModel::new(
        vec![0, 1, 2],
        vec![(0, 1, j_in), (1, 2, j_in), (0, 2, chi * j_in * j_in)],
        Vec::new(),
    )
}

/// Classical Gibbs distribution of [`bs_model`] at inverse temperature `beta`.
pub fn bs_distribution(j_in: f64, chi: f64, beta: f64) -> Result<DiscreteDistribution> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "inverse temperature must be positive, got {beta}"
        )));
    }
    bs_model(j_in, chi)?.enumerate_gibbs(beta)
}
