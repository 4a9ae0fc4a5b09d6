#![allow(dead_code)]

use emle_core::{parse_generators, ContingencyTable, FactorSpec, ModelFormula};
use rand::Rng;

pub fn table(names: &[&str], levels: &[usize], counts: Vec<u64>) -> ContingencyTable {
    let factors = names
        .iter()
        .zip(levels)
        .map(|(n, &l)| FactorSpec::new(*n, (1..=l).map(|x| x.to_string())).unwrap())
        .collect();
    ContingencyTable::new(factors, counts).unwrap()
}

pub fn haberman() -> ContingencyTable {
    table(&["a", "b", "c"], &[2, 2, 2], vec![0, 1, 2, 1, 4, 1, 3, 0])
}

/// The 3×3×3 example: three a×b slices for c = 1, 2, 3.
pub fn example_3x3x3() -> ContingencyTable {
    let slices: [[[u64; 3]; 3]; 3] = [
        [[0, 1, 0], [0, 1, 1], [1, 1, 1]],
        [[1, 1, 1], [1, 1, 1], [1, 0, 0]],
        [[1, 1, 1], [1, 1, 1], [1, 0, 0]],
    ];
    let mut counts = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for slice in &slices {
                counts.push(slice[a][b]);
            }
        }
    }
    table(&["a", "b", "c"], &[3, 3, 3], counts)
}

/// Random small instance: shape from {2×2×2, 2×2×3, 3×3}, ~40% zeros,
/// positive counts uniform on 1..=5, never all zero.
pub fn random_instance<R: Rng>(rng: &mut R) -> (ContingencyTable, ModelFormula) {
    let shapes: [&[usize]; 3] = [&[2, 2, 2], &[2, 2, 3], &[3, 3]];
    let shape = shapes[rng.gen_range(0..shapes.len())];
    let names = &["a", "b", "c"][..shape.len()];
    let cells: usize = shape.iter().product();
    let counts = loop {
        let c: Vec<u64> = (0..cells)
            .map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(1..=5) })
            .collect();
        if c.iter().any(|&x| x > 0) {
            break c;
        }
    };
    let models: &[&str] = if shape.len() == 3 {
        &["[a][b][c]", "[ab][c]", "[ab][bc]", "[ab][bc][ac]"]
    } else {
        &["[a][b]", "[ab]"]
    };
    let model = parse_generators(models[rng.gen_range(0..models.len())]).unwrap();
    (table(names, shape, counts), model)
}
