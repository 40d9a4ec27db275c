//! Splits a 2000-comment synthetic corpus 80/20, trains the n-gram baseline
//! and prints per-emotion and micro metrics.
//!
//! cargo run --release --example baseline

use emoaug::corpus::stratified_split;
use emoaug::eval::{micro_metrics, train_baseline, ConfusionCounts, Hyper};
use emoaug::synth::reference_sized_corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = reference_sized_corpus(0);
    let split = stratified_split(&ds, 0.2, 0)?;
    println!("train {} / test {}", split.train.len(), split.test.len());

    let model = train_baseline(&split.train, &Hyper::default())?;
    println!("{} n-gram features", model.vocabulary.len());
    let preds = model.predict(&split.test);
    let cc = ConfusionCounts::from_pairs(split.test.iter().map(|u| &u.labels).zip(preds.iter().map(|p| &p.predicted)));
    let m = micro_metrics(&cc);
    println!("{:<9} {:>9} {:>7} {:>6}", "", "precision", "recall", "f1");
    for (e, prf) in &m.per_emotion {
        println!("{:<9} {:>9.3} {:>7.3} {:>6.3}", e.name(), prf.precision, prf.recall, prf.f1);
    }
    println!("{:<9} {:>9.3} {:>7.3} {:>6.3}", "micro", m.micro.precision, m.micro.recall, m.micro.f1);
    println!("pooled counts {:?}", cc.pooled());

    let text = "I am worried this migration will break the cache.";
    println!("{text:?} -> {:?}", model.predict_text(text));
    Ok(())
}
