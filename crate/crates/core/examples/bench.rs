//! Median recognition time for doubling leaf counts.

use genfitch::bench::bench_recognize;

fn main() {
    let mut last = None;
    for n in [64, 128, 256, 512] {
        let r = bench_recognize(n, 4, 0, 5);
        let t = r.median();
        match last {
            Some(p) => println!("{n}\t{t:.6}\tratio {:.2}", t / p),
            None => println!("{n}\t{t:.6}"),
        }
        last = Some(t);
    }
}
