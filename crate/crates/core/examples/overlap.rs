//! False-negative overlap between three classifiers on one test set. The
//! "tools" here are baselines trained on disjoint thirds of the training set.
//!
//! cargo run --release --example overlap

use emoaug::corpus::stratified_split;
use emoaug::eval::{tool_overlap, train_on, Hyper};
use emoaug::synth::reference_sized_corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = reference_sized_corpus(4);
    let split = stratified_split(&ds, 0.2, 4)?;
    let train = &split.train.instances;
    let third = train.len() / 3;
    let slices = [
        ("tool-a", &train[..third]),
        ("tool-b", &train[third..2 * third]),
        ("tool-c", &train[2 * third..]),
    ];
    let mut tools = Vec::new();
    for (name, slice) in slices {
        let model = train_on(slice, &Hyper::default())?;
        tools.push((name.to_string(), model.predict(&split.test)));
    }
    let overlap = tool_overlap(&split.test, &tools)?;
    println!("False negatives, all emotions pooled:");
    print!("{}", overlap.false_negatives["all"].render());
    for (emotion, report) in &overlap.false_negatives {
        if emotion != "all" {
            println!("{emotion:<9} shared by all: {}", report.all_shared_summary());
        }
    }
    Ok(())
}
