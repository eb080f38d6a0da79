#![allow(dead_code)]

use so42::GeneratorId;

/// Commutation relations of the real (skew-Hermitian) basis, one entry per
/// unordered family pair, transcribed independently of the library table.
/// `kind`: 'e' = ε_ijk vector result, 'd' = δ_ij scalar result,
/// 'c' = componentwise vector result, 's' = scalar pair, '0' = vanishes.
pub const FAMILY_RELATIONS: &[(&str, &str, char, &str, i64)] = &[
    ("L", "L", 'e', "L", 1),
    ("L", "A", 'e', "A", 1),
    ("L", "B", 'e', "B", 1),
    ("L", "G", 'e', "G", 1),
    ("L", "S", '0', "", 0),
    ("L", "C", '0', "", 0),
    ("L", "D", '0', "", 0),
    ("A", "A", 'e', "L", 1),
    ("A", "B", 'd', "S", 1),
    ("A", "G", 'd', "C", 1),
    ("A", "S", 'c', "B", -1),
    ("A", "C", 'c', "G", -1),
    ("A", "D", '0', "", 0),
    ("B", "B", 'e', "L", -1),
    ("B", "G", 'd', "D", 1),
    ("B", "S", 'c', "A", -1),
    ("B", "C", '0', "", 0),
    ("B", "D", 'c', "G", 1),
    ("G", "G", 'e', "L", -1),
    ("G", "S", '0', "", 0),
    ("G", "C", 'c', "A", -1),
    ("G", "D", 'c', "B", -1),
    ("C", "S", 's', "D", -1),
    ("S", "D", 's', "C", 1),
    ("D", "C", 's', "S", 1),
];

fn member(family: &str, k: usize) -> GeneratorId {
    let name = if matches!(family, "S" | "C" | "D") {
        family.to_string()
    } else {
        format!("{family}{k}")
    };
    name.parse().unwrap()
}

fn is_vector(family: &str) -> bool {
    !matches!(family, "S" | "C" | "D")
}

fn eps(i: usize, j: usize, k: usize) -> i64 {
    ((j as i64 - i as i64) * (k as i64 - i as i64) * (k as i64 - j as i64)) / 2
}

/// Expected `[X_a, X_b]` as a 15-vector of integer coefficients.
pub fn expected_bracket(a: GeneratorId, b: GeneratorId) -> [i64; 15] {
    let comps = |f: &str| if is_vector(f) { vec![1, 2, 3] } else { vec![1] };
    let mut out = [0i64; 15];
    for &(fx, fy, kind, fz, s) in FAMILY_RELATIONS {
        for i in comps(fx) {
            for j in comps(fy) {
                let (x, y) = (member(fx, i), member(fy, j));
                // [x, y] in the orientation of the relation
                let mut v = [0i64; 15];
                match kind {
                    'e' => {
                        for k in 1..=3 {
                            v[member(fz, k).index()] += s * eps(i, j, k);
                        }
                    }
                    'd' if i == j => v[member(fz, 1).index()] += s,
                    'c' => v[member(fz, if is_vector(fx) { i } else { j }).index()] += s,
                    's' => v[member(fz, 1).index()] += s,
                    _ => {}
                }
                let sign = if (x, y) == (a, b) {
                    1
                } else if (y, x) == (a, b) && fx != fy {
                    -1
                } else {
                    continue;
                };
                for (o, w) in out.iter_mut().zip(v) {
                    *o += sign * w;
                }
            }
        }
    }
    out
}
