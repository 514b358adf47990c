use conftc::chains::ChainComplexF2;
use conftc::symbols::ComplexParams;
use std::time::Instant;

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let p = ComplexParams::new(args[0], args[1]).unwrap();
    let t = Instant::now();
    let c = ChainComplexF2::build(p).unwrap();
    println!("built {:?} in {:?}", c.cell_counts(), t.elapsed());
    let t = Instant::now();
    println!("betti {:?} in {:?}", c.betti(), t.elapsed());
}
