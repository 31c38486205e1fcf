//! Encode a feature vector as amplitudes and show the basis probabilities.

use mqml::quantum::amplitude_encode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = [0.5, 1.0, 2.0, 0.0, 3.0];
    let psi = amplitude_encode(&x)?;
    println!(
        "{} features -> {} qubits (padded from {:?})",
        x.len(),
        psi.n_qubits(),
        psi.padded_from()
    );
    for (j, p) in psi.probabilities().iter().enumerate() {
        println!("|{j:03b}>  p = {p:.6}");
    }
    Ok(())
}
