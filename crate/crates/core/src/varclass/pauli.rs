use num_complex::Complex64;

use super::model::VariationalModel;
use crate::error::{Error, Result};

/// Largest register for the full `4^n` Pauli expansion.
pub const MAX_PAULI_QUBITS: usize = 4;

/// Both sides of `⟨Φ|W†fW|Φ⟩ = 2^{−n} Σ_α w_α Φ_α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliExpansion {
    /// Computed on the statevector.
    pub lhs: f64,
    pub rhs: f64,
    /// `Σ_α Φ_α²`, equal to `2^n` for a pure state.
    pub phi_norm_sq: f64,
    /// `Σ_α w_α²`, equal to `4^n` for a ±1 observable.
    pub w_norm_sq: f64,
}

/// `P_α |v⟩`, with base-4 digit `k` of `α` selecting I, X, Y, Z on qubit `k`.
fn apply_pauli(alpha: usize, n: usize, v: &[Complex64]) -> Vec<Complex64> {
    let (mut xmask, mut zmask, mut ycount) = (0usize, 0usize, 0u32);
    for q in 0..n {
        match (alpha >> (2 * q)) & 3 {
            1 => xmask |= 1 << q,
            2 => {
                xmask |= 1 << q;
                zmask |= 1 << q;
                ycount += 1;
            }
            3 => zmask |= 1 << q,
            _ => {}
        }
    }
    // Y = i X Z, so P = i^{#Y} X^x Z^z
    let global = Complex64::i().powu(ycount);
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (z, amp) in v.iter().enumerate() {
        let sign = if (z & zmask).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        out[z ^ xmask] = global * amp * sign;
    }
    out
}

pub fn pauli_expansion_check(model: &VariationalModel, x: &[f64]) -> Result<PauliExpansion> {
    let n = model.n_qubits();
    if n > MAX_PAULI_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let phi = model.feature.state(x)?;
    let w = model.w_circuit()?;
    let lhs = model.f.expectation(&phi.evolved(&w)?)?;

    // M = W† F W
    let u = w.unitary();
    let dim = u.dim();
    let fdiag = model.f.diagonal();
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            m[r * dim + c] = (0..dim)
                .map(|k| u.get(k, r).conj() * fdiag[k] * u.get(k, c))
                .sum();
        }
    }

    let amps = phi.amplitudes();
    let (mut rhs, mut phi_norm_sq, mut w_norm_sq) = (0.0, 0.0, 0.0);
    for alpha in 0..dim * dim {
        let p_phi = apply_pauli(alpha, n, amps);
        let phi_alpha: Complex64 = amps.iter().zip(&p_phi).map(|(a, b)| a.conj() * b).sum();
        // tr(M P) = Σ_c ⟨c| M P |c⟩ = Σ_c Σ_r M[c][r] (P|c⟩)_r
        let mut w_alpha = Complex64::new(0.0, 0.0);
        for c in 0..dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[c] = Complex64::new(1.0, 0.0);
            let pc = apply_pauli(alpha, n, &e);
            w_alpha += (0..dim).map(|r| m[c * dim + r] * pc[r]).sum::<Complex64>();
        }
        rhs += w_alpha.re * phi_alpha.re;
        phi_norm_sq += phi_alpha.re * phi_alpha.re;
        w_norm_sq += w_alpha.re * w_alpha.re;
    }
    Ok(PauliExpansion {
        lhs,
        rhs: rhs / dim as f64,
        phi_norm_sq,
        w_norm_sq,
    })
}
