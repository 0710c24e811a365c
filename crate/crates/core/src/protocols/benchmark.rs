use super::result::InputClass;
use crate::error::Result;

/// Best classical (measure-and-prepare) fidelity for each input family:
/// `(1+n̄)/(1+2n̄)` for Gaussian-distributed coherent states, `2/3` for
/// arbitrary qubits, `√s/(1+s)` for pure squeezed states of variance `s`.
pub fn classical_benchmark(class: InputClass) -> Result<f64> {
    class.validate()?;
    Ok(match class {
        InputClass::CoherentGaussian { n_bar } => (1.0 + n_bar) / (1.0 + 2.0 * n_bar),
        InputClass::Qubit => 2.0 / 3.0,
        InputClass::Squeezed { s } => s.sqrt() / (1.0 + s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coherent_limits() {
        assert_abs_diff_eq!(
            classical_benchmark(InputClass::CoherentGaussian { n_bar: 0.0 }).unwrap(),
            1.0
        );
        assert_abs_diff_eq!(
            classical_benchmark(InputClass::CoherentGaussian { n_bar: 8.0 }).unwrap(),
            9.0 / 17.0
        );
        assert_abs_diff_eq!(
            classical_benchmark(InputClass::CoherentGaussian { n_bar: 1e12 }).unwrap(),
            0.5,
            epsilon = 1e-9
        );
        assert!(classical_benchmark(InputClass::CoherentGaussian { n_bar: -1.0 }).is_err());
    }

    #[test]
    fn qubit_and_squeezed() {
        assert_abs_diff_eq!(classical_benchmark(InputClass::Qubit).unwrap(), 2.0 / 3.0);
        assert_abs_diff_eq!(
            classical_benchmark(InputClass::Squeezed { s: 1.0 }).unwrap(),
            0.5
        );
        // approaches zero for large squeezing
        assert!(classical_benchmark(InputClass::Squeezed { s: 1e8 }).unwrap() < 1e-3);
    }
}
