// Train a multi-descriptor NCM forest on the synthetic benchmark.

use caddy::ncmf::{evaluate, gaussian_benchmark, train, BenchmarkSpec, DescriptorSample, ForestParams};

pub fn run_example() -> anyhow::Result<f64> {
    let (train_set, test_set) = gaussian_benchmark(&BenchmarkSpec::default());
    let forest = train(&train_set, &ForestParams::default())?;
    let eval = evaluate(&forest, &test_set)?;
    println!("test accuracy {:.3} on {} samples", eval.accuracy, eval.samples);
    for (c, row) in eval.confusion.iter().enumerate() {
        println!("  class {c}: {row:?}");
    }
    let probe = DescriptorSample::unlabeled(vec![vec![0.0, 0.0], vec![6.0, 0.0]]);
    let (class, posterior) = forest.predict(&probe)?;
    println!("probe -> class {class}, posterior {posterior:.3?}");
    Ok(eval.accuracy)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example().map(drop)
}
