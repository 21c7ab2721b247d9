//! The three end-user modes with one classifier: user-dependent, mixed-user
//! and leave-one-user-out.
//!
//! ```text
//! cargo run --release --example user_modes -- [et|gb|rc]
//! ```

use gesture_core::classifiers::{ClassifierKind, ClassifierSpec};
use gesture_core::evaluation::{crossval_chart_data, per_user_table, render_summary, run_mode, Mode, TimingConfig};
use gesture_core::features::extract_all;
use gesture_core::synth::{generate, SynthSpec};

fn main() -> gesture_core::Result<()> {
    let kind: ClassifierKind = std::env::args().nth(1).as_deref().unwrap_or("et").parse()?;
    let matrix = extract_all(&generate(&SynthSpec::easy())?)?;
    let spec = ClassifierSpec::default_for(kind, 0);
    let timing = TimingConfig::default();

    let dependent = run_mode(&matrix, Mode::UserDependent, 0.75, 0, &spec, &timing)?;
    print!("{}", per_user_table(&dependent.reports)?.to_csv_string());

    let mixed = run_mode(&matrix, Mode::Mixed, 0.75, 0, &spec, &timing)?;
    println!();
    print!("{}", render_summary(&mixed));

    let independent = run_mode(&matrix, Mode::UserIndependent, 0.75, 0, &spec, &timing)?;
    println!("\nleave-one-user-out folds:");
    for (user, acc) in crossval_chart_data(&independent.reports) {
        println!("  user {user}: {acc:6.2} %");
    }
    println!(
        "\naverages  U_D {:.2}  U_M {:.2}  U_I {:.2}",
        dependent.average_accuracy, mixed.average_accuracy, independent.average_accuracy
    );
    Ok(())
}
