//! Prior models over utility directions: deterministic sampling, exact
//! versus Monte-Carlo measures, conditionals, and transparency of null
//! sets.
//!
//! ```bash
//! cargo run -p eiv --example priors_and_measures
//! ```

use eiv::config::PathPolicy;
use eiv::geometry::ConeUnion;
use eiv::identification::{identified_family, is_transparent, Experiment};
use eiv::prior::{PriorError, PriorModel};
use eiv::{EvalConfig, Menu};

fn main() {
    let menu = Menu::from_rows(&[
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.5, 0.5, 0.0], // an edge midpoint: identifies only a boundary ray
    ])
    .unwrap();
    let prior = PriorModel::uniform(3, 42);
    let exact = EvalConfig::default();
    let mc = EvalConfig {
        path: PathPolicy::ForceMonteCarlo,
        n_samples: 50_000,
        ..EvalConfig::default()
    };

    // sampling is deterministic per index, independent of batching
    let a = prior.sample(5).unwrap();
    let b: Vec<_> = (0..5).map(|i| prior.sample_at(i).unwrap()).collect();
    assert_eq!(a, b);
    println!("first draw: {:?}", a[0].coords());

    let w = ConeUnion::from_menu_cell(&menu, &[0]);
    let m_exact = prior.measure(&w, &exact).unwrap();
    let m_mc = prior.measure(&w, &mc).unwrap();
    println!(
        "\nmass of the first vertex cell: exact {:.9}, monte carlo {:.5} (se {:.5})",
        m_exact.value, m_mc.value, m_mc.std_error
    );

    let v = ConeUnion::from_menu_cell(&menu, &[0, 1]);
    let cond = prior.conditional_measure(&w, &v, &exact).unwrap();
    println!("conditional mass within the first two cells: {:.9}", cond.value);

    match prior.conditional_measure(&w, &ConeUnion::empty(3), &exact) {
        Err(PriorError::ConditioningOnNull) => {
            println!("conditioning on a null event is rejected, as it must be")
        }
        other => println!("unexpected: {other:?}"),
    }

    // the midpoint's cell is a boundary ray: mass zero, hence transparent
    let ray = ConeUnion::from_menu_cell(&menu, &[3]);
    let value = |e: &Experiment| -> Result<f64, PriorError> {
        let fam = identified_family(e, &prior, &exact)
            .map_err(|_| PriorError::ConditioningOnNull)?;
        Ok(fam
            .cells
            .iter()
            .filter(|(_, m)| m.value > 1e-9)
            .map(|(_, m)| -m.value * m.value.ln())
            .sum())
    };
    let transparent = is_transparent(&ray, &prior, &exact, 1e-9, value).unwrap();
    println!("\nboundary-ray cell is transparent: {transparent}");
    let opaque = is_transparent(&w, &prior, &exact, 1e-9, value).unwrap();
    println!("vertex cell is transparent: {opaque}");
}
