//! Weight-vector orders: majorization, T-transform chains, h-splits and the
//! Kronecker product.

use sdcomb::majorization::{compare, is_h_split_majorized, kronecker, t_transform_chain};
use sdcomb::WeightVector;

fn main() -> sdcomb::Result<()> {
    let theta = [0.2, 0.3, 0.5];
    let eta = [0.1, 0.1, 0.8];
    println!("(0.2,0.3,0.5) vs (0.1,0.1,0.8): {}", compare(&theta, &eta));

    if let Some(chain) = t_transform_chain(&theta, &eta) {
        let mut v = eta.to_vec();
        for t in &chain {
            t.apply(&mut v);
            println!("  {t} -> {v:?}");
        }
    }

    println!("(0.4,0.6) vs (0.2,0.8): {}", compare(&[0.4, 0.6], &[0.2, 0.8]));
    println!("(0.3,0.3,0.4) vs (0.35,0.65): {}", compare(&[0.3, 0.3, 0.4], &[0.35, 0.65]));

    let split = [0.25, 0.25, 0.5];
    println!("(1/4,1/4,1/2) h-split of (1/2,1/2): {}", is_h_split_majorized(&split, &[0.5, 0.5])?);
    println!("(1/3,1/3,1/3) h-split of (1/2,1/2): {}", is_h_split_majorized(&[1.0 / 3.0; 3], &[0.5, 0.5])?);

    let k = kronecker(&WeightVector::new(vec![0.2, 0.8])?, &WeightVector::sample_mean(2));
    println!("(0.2,0.8) x (1/2,1/2) = {k}");
    Ok(())
}
