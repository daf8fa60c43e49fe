//! Fitting a single-attribute threshold model and inspecting its candidates.
//!
//! cargo run --example threshold_model

use decay::eval::Metric;
use decay::stm;

fn main() -> decay::Result<()> {
    let degree = [1.0, 1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 9.0];
    let left = [true, true, true, false, false, false, false, false, false, false];

    for c in stm::scan(&degree, &left, Metric::F1)?.iter().filter(|c| c.score > 0.0) {
        println!("lambda {:>3} {:?}: F1 {:.3}", c.lambda, c.orientation, c.score);
    }
    let model = stm::fit("degree", &degree, &left, Metric::F1)?;
    println!(
        "chosen: leave when degree {:?} {} (training F1 {:.3})",
        model.orientation, model.lambda, model.training_score
    );
    println!("predictions for [1, 3, 7]: {:?}", stm::predict(&model, &[1.0, 3.0, 7.0]));
    Ok(())
}
