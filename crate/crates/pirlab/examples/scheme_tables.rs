//! Prints the retrieval scheme tables for the two worked examples:
//! first-neighbor privacy on the 5-cycle and modified-edge privacy on
//! the 4-path, with identity permutations.

use pirlab::cli::render_scheme_table;
use pirlab::model::{GraphKind, PrivacySetting, StorageGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c5 = StorageGraph::build(GraphKind::Cycle, 5)?;
    println!("first-neighbor on C_5:");
    print!("{}", render_scheme_table(&PrivacySetting::CyclicFirstNeighbor, &c5)?);

    let p4 = StorageGraph::build(GraphKind::Path, 4)?;
    println!();
    println!("modified-edge on P_4:");
    print!("{}", render_scheme_table(&PrivacySetting::PathModifiedEdge, &p4)?);
    Ok(())
}
