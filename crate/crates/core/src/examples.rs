//! Worked examples: an amplitude-damping-like channel on a qubit pair with
//! a noiseless qubit, a non-unital two-qubit channel with two noiseless
//! subsystems, a correctable subsystem that is not noiseless, and a
//! dephasing channel with a unitarily noiseless qubit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::QuantumChannel;
use crate::correction::{RecoveryChannel, RecoveryOrigin};
use crate::error::ExampleError;
use crate::matkit::{ComplexMatrix, Tolerance, C64};
use crate::noiseless::SubsystemDecomposition;
use crate::random;

/// Seed of the default second basis in [`example_oqec`].
pub const OQEC_BASIS_SEED: u64 = 7;

#[derive(Clone, Debug)]
pub struct NamedDecomposition {
    pub label: &'static str,
    pub decomposition: SubsystemDecomposition,
}

#[derive(Clone, Debug)]
pub struct WorkedExample {
    pub name: &'static str,
    pub parameters: Vec<(&'static str, f64)>,
    pub channel: QuantumChannel,
    pub decompositions: Vec<NamedDecomposition>,
    pub recoveries: Vec<RecoveryChannel>,
    /// The unitary of a unitarily noiseless example.
    pub unitary: Option<ComplexMatrix>,
}

impl WorkedExample {
    pub fn decomposition(&self, label: &str) -> Option<&SubsystemDecomposition> {
        self.decompositions
            .iter()
            .find(|d| d.label == label)
            .map(|d| &d.decomposition)
    }
}

fn named(label: &'static str, decomposition: SubsystemDecomposition) -> NamedDecomposition {
    NamedDecomposition { label, decomposition }
}

fn basis_vector(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[i] = C64::new(1.0, 0.0);
    v
}

fn combine(terms: &[(f64, usize)], d: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    for &(c, i) in terms {
        v[i] += C64::new(c, 0.0);
    }
    v
}

/// `E_i = F_i ⊗ 1_2` with `F_0 = diag(√γ, √(1−γ))`,
/// `F_1 = [[0, √γ], [√(1−γ), 0]]`.
pub fn example1(gamma: f64) -> Result<WorkedExample, ExampleError> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(ExampleError::ParameterRange {
            name: "gamma",
            value: gamma,
            range: "[0, 1]",
        });
    }
    let (g, h) = (gamma.sqrt(), (1.0 - gamma).sqrt());
    let f0 = ComplexMatrix::from_real_rows(&[&[g, 0.0], &[0.0, h]]);
    let f1 = ComplexMatrix::from_real_rows(&[&[0.0, g], &[h, 0.0]]);
    let id = ComplexMatrix::identity(2);
    let channel = QuantumChannel::new(vec![f0.tensor(&id), f1.tensor(&id)])?;
    Ok(WorkedExample {
        name: "example1",
        parameters: vec![("gamma", gamma)],
        channel,
        decompositions: vec![named("AB", SubsystemDecomposition::standard(4, 2, 2)?)],
        recoveries: vec![],
        unitary: None,
    })
}

/// The non-unital channel with `α = √(1−2q)`, `β = √q`:
/// `E_0 = α(|00⟩⟨00| + |11⟩⟨11|) + |01⟩⟨01| + |10⟩⟨10|`,
/// `E_1 = β(|00⟩⟨00| + |10⟩⟨00| + |01⟩⟨11| + |11⟩⟨11|)`.
///
/// Carries `B1` (the subspace spanned by `|01⟩, |10⟩`) and `B2` (the
/// Bell-like split `|α_1β_1⟩ = (|00⟩+|11⟩)/√2`, `|α_1β_2⟩ = (|00⟩−|11⟩)/√2`,
/// `|α_2β_1⟩ = (|10⟩+|01⟩)/√2`, `|α_2β_2⟩ = (|10⟩−|01⟩)/√2`).
pub fn example2(q: f64) -> Result<WorkedExample, ExampleError> {
    if !(q > 0.0 && q < 0.5) {
        return Err(ExampleError::ParameterRange {
            name: "q",
            value: q,
            range: "(0, 1/2)",
        });
    }
    let (alpha, beta) = ((1.0 - 2.0 * q).sqrt(), q.sqrt());
    let kb = |i, j| ComplexMatrix::ket_bra(4, i, j);
    let (s00, s01, s10, s11) = (0, 1, 2, 3);
    let e0 = &(&kb(s00, s00) + &kb(s11, s11)).scale_real(alpha) + &(&kb(s01, s01) + &kb(s10, s10));
    let e1 = (&(&(&kb(s00, s00) + &kb(s10, s00)) + &kb(s01, s11)) + &kb(s11, s11)).scale_real(beta);
    let channel = QuantumChannel::new(vec![e0, e1])?;

    let tol = Tolerance::default();
    let b1 = ComplexMatrix::from_columns(4, &[basis_vector(4, s01), basis_vector(4, s10)]);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let b2 = ComplexMatrix::from_columns(
        4,
        &[
            combine(&[(r, s00), (r, s11)], 4),
            combine(&[(r, s00), (-r, s11)], 4),
            combine(&[(r, s10), (r, s01)], 4),
            combine(&[(r, s10), (-r, s01)], 4),
        ],
    );
    Ok(WorkedExample {
        name: "example2",
        parameters: vec![("q", q)],
        channel,
        decompositions: vec![
            named("B1", SubsystemDecomposition::new(1, 2, b1, &tol)?),
            named("B2", SubsystemDecomposition::new(2, 2, b2, &tol)?),
        ],
        recoveries: vec![],
        unitary: None,
    })
}

/// Correctable subsystem on `C^4` built from two orthonormal bases
/// `{a, b, a′, b′}` (computational) and `{a_1, b_1, a_2, b_2}` (a seeded
/// random basis).
pub fn example_oqec() -> Result<WorkedExample, ExampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(OQEC_BASIS_SEED);
    example_oqec_with_basis(&random::unitary(4, &mut rng))
}

/// As [`example_oqec`], with the columns of `basis` as `a_1, b_1, a_2, b_2`.
///
/// `U_j` maps `a, b` to `a_j, b_j` and `U_j′` maps `a′, b′` to `a_j, b_j`;
/// the channel is `E_1 = (U_1 + U_1′)/√2`, `E_2 = (U_2 − U_2′)/√2` and the
/// known recovery is `{V_jk† Q_j / √2}` with `V_j1 = U_j`, `V_j2 = U_j′` and
/// `Q_j` the projector onto `span{a_j, b_j}`.
pub fn example_oqec_with_basis(basis: &ComplexMatrix) -> Result<WorkedExample, ExampleError> {
    if basis.shape() != (4, 4) {
        return Err(ExampleError::Basis {
            residual: f64::INFINITY,
        });
    }
    let residual = basis.unitarity_residual();
    if residual > Tolerance::default().atol {
        return Err(ExampleError::Basis { residual });
    }
    let second = basis.columns();
    let first: Vec<Vec<C64>> = (0..4).map(|i| basis_vector(4, i)).collect();
    let (a, b, ap, bp) = (&first[0], &first[1], &first[2], &first[3]);
    let map = |to_a: &[C64], to_b: &[C64], from_a: &[C64], from_b: &[C64]| {
        &ComplexMatrix::outer(to_a, from_a) + &ComplexMatrix::outer(to_b, from_b)
    };
    let (a1, b1, a2, b2) = (&second[0], &second[1], &second[2], &second[3]);
    let u1 = map(a1, b1, a, b);
    let u1p = map(a1, b1, ap, bp);
    let u2 = map(a2, b2, a, b);
    let u2p = map(a2, b2, ap, bp);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let e1 = (&u1 + &u1p).scale_real(r);
    let e2 = (&u2 - &u2p).scale_real(r);
    let channel = QuantumChannel::new(vec![e1, e2])?;

    let q1 = &ComplexMatrix::outer(a1, a1) + &ComplexMatrix::outer(b1, b1);
    let q2 = &ComplexMatrix::outer(a2, a2) + &ComplexMatrix::outer(b2, b2);
    let mut kraus = Vec::with_capacity(4);
    for (vs, q) in [([&u1, &u1p], &q1), ([&u2, &u2p], &q2)] {
        for v in vs {
            kraus.push((&v.adjoint() * q).scale_real(r));
        }
    }
    let recovery = RecoveryChannel {
        channel: QuantumChannel::new(kraus)?,
        origin: RecoveryOrigin::Supplied,
    };
    Ok(WorkedExample {
        name: "oqec",
        parameters: vec![],
        channel,
        decompositions: vec![named("AB", SubsystemDecomposition::standard(4, 2, 2)?)],
        recoveries: vec![recovery],
        unitary: None,
    })
}

/// Dephasing `{Z_1/√2, Z_2/√2}` on two qubits with the sign flip
/// `U = diag(1, 1, 1, −1)`; the qubit spanned by `|00⟩, |11⟩` is corrected
/// by `U†(·)U`.
pub fn example_uns() -> Result<WorkedExample, ExampleError> {
    let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
    let id = ComplexMatrix::identity(2);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let channel = QuantumChannel::new(vec![
        z.tensor(&id).scale_real(r),
        id.tensor(&z).scale_real(r),
    ])?;
    let u = ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, -1.0]);
    let w = ComplexMatrix::from_columns(4, &[basis_vector(4, 0), basis_vector(4, 3)]);
    Ok(WorkedExample {
        name: "uns",
        parameters: vec![],
        channel,
        decompositions: vec![named(
            "UNS",
            SubsystemDecomposition::new(1, 2, w, &Tolerance::default())?,
        )],
        recoveries: vec![],
        unitary: Some(u),
    })
}

/// Looks an example up by name with `key=value` parameters.
pub fn by_name(name: &str, params: &[(String, f64)]) -> Result<WorkedExample, String> {
    let (key, default) = match name {
        "example1" => (Some("gamma"), 0.3),
        "example2" => (Some("q"), 0.25),
        "oqec" | "uns" => (None, 0.0),
        other => {
            return Err(format!(
                "unknown example {other}; expected one of example1, example2, oqec, uns"
            ))
        }
    };
    let mut value = default;
    for (k, v) in params {
        if Some(k.as_str()) != key {
            return Err(format!("example {name} has no parameter {k}"));
        }
        value = *v;
    }
    let ex = match name {
        "example1" => example1(value),
        "example2" => example2(value),
        "oqec" => example_oqec(),
        _ => example_uns(),
    };
    ex.map_err(|e| e.to_string())
}
