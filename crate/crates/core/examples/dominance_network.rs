//! Every sample-mean dominance implied by X̄₃ ≥st X̄₂ ≥st X up to size 24.

use sdcomb::majorization::{dominance_network, DominanceEdge};

fn main() -> sdcomb::Result<()> {
    let base = [DominanceEdge::new(2, 1)?, DominanceEdge::new(3, 2)?];
    let net = dominance_network(&base, 24)?;
    println!("{} edges", net.len());
    for e in &net {
        println!("mean of {} >=st mean of {}", e.from_size, e.to_size);
    }
    Ok(())
}
