//! Tables shipped with the crate so the worked examples run offline.
//!
//! - `haberman`: 2×2×2 table whose no-three-way-interaction MLE does not exist
//! - `example3x3x3`: 3×3×3 table where one zero cell is pulled back onto the face
//! - `rochdale`: 8 binary factors `a`–`h`, 256 cells, N = 665, from the
//!   Rochdale household survey (levels coded 0/1)

use emle_core::ContingencyTable;

use crate::io::{parse_table, TableError};

pub const NAMES: &[&str] = &["haberman", "example3x3x3", "rochdale"];

const HABERMAN: &str = "\
a,b,c,freq
0,0,0,0
0,0,1,1
0,1,0,2
0,1,1,1
1,0,0,4
1,0,1,1
1,1,0,3
1,1,1,0
";

const ROCHDALE: &str = include_str!("../data/rochdale.csv");

/// The 3×3×3 example as a×b slices for c = 1, 2, 3.
const EXAMPLE_SLICES: [[[u64; 3]; 3]; 3] = [
    [[0, 1, 0], [0, 1, 1], [1, 1, 1]],
    [[1, 1, 1], [1, 1, 1], [1, 0, 0]],
    [[1, 1, 1], [1, 1, 1], [1, 0, 0]],
];

fn example3x3x3() -> String {
    let mut out = String::from("a,b,c,freq\n");
    for a in 0..3 {
        for b in 0..3 {
            for (c, slice) in EXAMPLE_SLICES.iter().enumerate() {
                out.push_str(&format!("{},{},{},{}\n", a + 1, b + 1, c + 1, slice[a][b]));
            }
        }
    }
    out
}

/// Loads a bundled table by name; `None` for an unknown name.
pub fn builtin(name: &str) -> Option<Result<ContingencyTable, TableError>> {
    let text = match name {
        "haberman" => HABERMAN.to_owned(),
        "example3x3x3" => example3x3x3(),
        "rochdale" => ROCHDALE.to_owned(),
        _ => return None,
    };
    Some(parse_table(text.as_bytes(), "freq"))
}
