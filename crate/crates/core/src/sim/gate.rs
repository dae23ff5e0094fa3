use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gates understood by the simulator.
///
/// Rotations follow `RY(θ) = exp(-iθY/2)` and `RZ(θ) = exp(-iθZ/2)`.
/// `ZzPhase(λ)` is the diagonal `exp(iλ Z_a Z_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    H { qubit: usize },
    X { qubit: usize },
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    Cz { a: usize, b: usize },
    Cnot { control: usize, target: usize },
    ZzPhase { a: usize, b: usize, angle: f64 },
}

/// Qubits a gate acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    One(usize),
    Two(usize, usize),
}

impl Support {
    pub fn as_vec(&self) -> Vec<usize> {
        match *self {
            Support::One(q) => vec![q],
            Support::Two(a, b) => vec![a, b],
        }
    }
}

impl Gate {
    pub fn h(qubit: usize) -> Self {
        Gate::H { qubit }
    }

    pub fn x(qubit: usize) -> Self {
        Gate::X { qubit }
    }

    pub fn ry(qubit: usize, angle: f64) -> Self {
        Gate::Ry { qubit, angle }
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Gate::Rz { qubit, angle }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Gate::Cz { a, b }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn zz_phase(a: usize, b: usize, angle: f64) -> Self {
        Gate::ZzPhase { a, b, angle }
    }

    /// `exp(iλ Z_a Z_b)` as CNOT · RZ(-2λ) · CNOT, the hardware-style form.
    pub fn zz_phase_decomposed(a: usize, b: usize, angle: f64) -> [Gate; 3] {
        [
            Gate::cnot(a, b),
            Gate::rz(b, -2.0 * angle),
            Gate::cnot(a, b),
        ]
    }

    pub fn support(&self) -> Support {
        match *self {
            Gate::H { qubit } | Gate::X { qubit } => Support::One(qubit),
            Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => Support::One(qubit),
            Gate::Cz { a, b } | Gate::ZzPhase { a, b, .. } => Support::Two(a, b),
            Gate::Cnot { control, target } => Support::Two(control, target),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self.support(), Support::Two(..))
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Ry { qubit, angle } => Gate::Ry {
                qubit,
                angle: -angle,
            },
            Gate::Rz { qubit, angle } => Gate::Rz {
                qubit,
                angle: -angle,
            },
            Gate::ZzPhase { a, b, angle } => Gate::ZzPhase {
                a,
                b,
                angle: -angle,
            },
            g => g,
        }
    }

    /// Checks that targets are distinct and below `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q >= n_qubits {
                Err(Error::QubitOutOfRange { index: q, n_qubits })
            } else {
                Ok(())
            }
        };
        match self.support() {
            Support::One(q) => check(q)?,
            Support::Two(a, b) => {
                check(a)?;
                check(b)?;
                if a == b {
                    return Err(Error::RepeatedQubit(a));
                }
            }
        }
        match *self {
            Gate::Ry { angle, .. } | Gate::Rz { angle, .. } | Gate::ZzPhase { angle, .. }
                if !angle.is_finite() =>
            {
                Err(Error::InvalidParameter(format!(
                    "non-finite gate angle {angle}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn kernel(&self) -> Kernel {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match *self {
            Gate::H { qubit } => Kernel::Single {
                bit: qubit,
                m: [
                    [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
                    [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
                ],
            },
            Gate::X { qubit } => Kernel::Single {
                bit: qubit,
                m: [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            },
            Gate::Ry { qubit, angle } => {
                let (s, co) = (angle / 2.0).sin_cos();
                Kernel::Single {
                    bit: qubit,
                    m: [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]],
                }
            }
            Gate::Rz { qubit, angle } => Kernel::Diagonal1 {
                bit: qubit,
                d: [
                    Complex64::from_polar(1.0, -angle / 2.0),
                    Complex64::from_polar(1.0, angle / 2.0),
                ],
            },
            Gate::Cz { a, b } => Kernel::Diagonal2 {
                a,
                b,
                d: [c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)],
            },
            Gate::ZzPhase { a, b, angle } => {
                let even = Complex64::from_polar(1.0, angle);
                let odd = even.conj();
                Kernel::Diagonal2 {
                    a,
                    b,
                    d: [even, odd, odd, even],
                }
            }
            Gate::Cnot { control, target } => Kernel::Cnot { control, target },
        }
    }
}

/// Low-level action of a gate on an amplitude array.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Kernel {
    Single {
        bit: usize,
        m: [[Complex64; 2]; 2],
    },
    Diagonal1 {
        bit: usize,
        d: [Complex64; 2],
    },
    /// Diagonal indexed by `bit_a | bit_b << 1`.
    Diagonal2 {
        a: usize,
        b: usize,
        d: [Complex64; 4],
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

impl Kernel {
    /// Applies the gate to `amps`, with every qubit index shifted up by
    /// `offset` bits. With `conjugate` set the complex conjugate matrix is
    /// applied instead, which is what right-multiplication by `U†` needs.
    pub(crate) fn apply(&self, amps: &mut [Complex64], offset: usize, conjugate: bool) {
        let cj = |z: Complex64| if conjugate { z.conj() } else { z };
        match *self {
            Kernel::Single { bit, m } => {
                let mask = 1usize << (bit + offset);
                let (m00, m01, m10, m11) = (cj(m[0][0]), cj(m[0][1]), cj(m[1][0]), cj(m[1][1]));
                for i in 0..amps.len() {
                    if i & mask == 0 {
                        let j = i | mask;
                        let (a0, a1) = (amps[i], amps[j]);
                        amps[i] = m00 * a0 + m01 * a1;
                        amps[j] = m10 * a0 + m11 * a1;
                    }
                }
            }
            Kernel::Diagonal1 { bit, d } => {
                let shift = bit + offset;
                let d = [cj(d[0]), cj(d[1])];
                for (i, amp) in amps.iter_mut().enumerate() {
                    *amp *= d[(i >> shift) & 1];
                }
            }
            Kernel::Diagonal2 { a, b, d } => {
                let (sa, sb) = (a + offset, b + offset);
                let d = [cj(d[0]), cj(d[1]), cj(d[2]), cj(d[3])];
                for (i, amp) in amps.iter_mut().enumerate() {
                    *amp *= d[((i >> sa) & 1) | (((i >> sb) & 1) << 1)];
                }
            }
            Kernel::Cnot { control, target } => {
                let cm = 1usize << (control + offset);
                let tm = 1usize << (target + offset);
                for i in 0..amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        amps.swap(i, i | tm);
                    }
                }
            }
        }
    }
}
