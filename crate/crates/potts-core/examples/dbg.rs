use potts_core::oracle::maps::for_each_planar_connected;
use std::time::Instant;

fn main() {
    for (m, n3) in [(2usize, 2usize), (4, 2), (6, 2), (2, 3), (4, 3), (2, 4), (4, 4), (6, 4)] {
        let mut rotations: Vec<Vec<usize>> = Vec::new();
        let mut next = 0usize;
        let mut take = |k: usize, next: &mut usize| {
            let v: Vec<usize> = (*next..*next + k).collect();
            *next += k;
            v
        };
        rotations.push(take(m, &mut next));
        for _ in 0..n3 {
            rotations.push(take(3, &mut next));
        }
        if (m + 3 * n3) % 2 != 0 { println!("(m={m},n3={n3}): odd, skip"); continue; }
        let t0 = Instant::now();
        let mut count = 0u64;
        for_each_planar_connected(&rotations, |_| count += 1);
        println!("(m={m},n3={n3}) H={}: {} pairings  ({:.2?})", m + 3*n3, count, t0.elapsed());
    }
}
