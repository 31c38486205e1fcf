//! Build a three-qubit state, run one ansatz layer and print ⟨Z⟩ per qubit.

use mqml::quantum::{RotParams, Statevector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut psi = Statevector::zero(3);
    psi.apply_rot(0, RotParams::new(std::f64::consts::FRAC_PI_2, 0.0, 0.0))?;
    psi.apply_cz(0, 1)?;
    let layer = [
        RotParams::new(0.3, 0.1, -0.2),
        RotParams::new(1.2, 0.0, 0.5),
        RotParams::new(-0.7, 0.4, 0.0),
    ];
    psi.apply_ansatz_layer(&layer)?;
    println!("norm² = {:.15}", psi.norm_sqr());
    for (q, e) in psi.expvals_z().iter().enumerate() {
        println!("<Z{q}> = {e:+.6}");
    }
    psi.write_tsv(std::io::stdout().lock())?;
    Ok(())
}
