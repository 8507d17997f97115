//! Writes the vendored catalog fixtures for orders 20, 24 and 28.
//!
//! Candidates come from the classical constructions, Goethals-Seidel arrays
//! over cancelling circulant quadruples, and the transposes of all of
//! these. One matrix is kept per distinct 4-profile, so the kept matrices
//! are pairwise inequivalent.
//!
//! Usage: cargo run --release -p fuglede-core --example vendor_constructions [out-dir] [gs-limit]

use std::collections::HashMap;
use std::path::PathBuf;

use fuglede_core::catalog::{
    cancelling_quadruples, content_hash, four_profile, goethals_seidel, kronecker, paley_i, paley_ii,
    sylvester, to_sign_text, williamson, write_dir, CatalogEntry, EntrySource, Manifest, ManifestRecord,
};
use fuglede_core::gf2::{dephased_rank, SignMatrix};

fn transpose(h: &SignMatrix) -> SignMatrix {
    let rows: Vec<Vec<i8>> = (0..h.order()).map(|j| h.rows().map(|r| r[j]).collect()).collect();
    SignMatrix::from_rows(&rows).expect("square")
}

fn bits(row: &[i8]) -> String {
    row.iter().map(|&x| if x == 1 { '0' } else { '1' }).collect()
}

fn candidates(order: usize, gs_limit: usize) -> Vec<(String, String, SignMatrix)> {
    let h2 = sylvester(1);
    let mut out: Vec<(String, String, Option<SignMatrix>)> = match order {
        20 => vec![
            ("paley-i-q19".into(), "paley-i(19)".into(), paley_i(19)),
            ("paley-ii-q9".into(), "paley-ii(9)".into(), paley_ii(9)),
            ("williamson-n5".into(), "williamson(5)".into(), williamson(5)),
        ],
        24 => vec![
            ("paley-i-q23".into(), "paley-i(23)".into(), paley_i(23)),
            ("kron-h2-paley-i-q11".into(), "kronecker(sylvester(1),paley-i(11))".into(), paley_i(11).map(|h| kronecker(&h2, &h))),
            ("williamson-n6".into(), "williamson(6)".into(), williamson(6)),
        ],
        28 => vec![
            ("paley-i-q27".into(), "paley-i(27)".into(), paley_i(27)),
            ("paley-ii-q13".into(), "paley-ii(13)".into(), paley_ii(13)),
            ("williamson-n7".into(), "williamson(7)".into(), williamson(7)),
        ],
        _ => vec![],
    };
    for [a, b, c, d] in cancelling_quadruples(order / 4, gs_limit) {
        let tag = format!("{}-{}-{}-{}", bits(&a), bits(&b), bits(&c), bits(&d));
        out.push((format!("gs-{tag}"), format!("goethals-seidel({tag})"), goethals_seidel(&a, &b, &c, &d)));
    }
    let base: Vec<(String, String, SignMatrix)> =
        out.into_iter().filter_map(|(l, r, h)| h.map(|h| (l, r, h))).collect();
    let transposed: Vec<(String, String, SignMatrix)> = base
        .iter()
        .map(|(l, r, h)| (format!("{l}-t"), format!("transpose({r})"), transpose(h)))
        .collect();
    base.into_iter().chain(transposed).collect()
}

fn main() {
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/catalog")));
    let gs_limit: usize = args.next().map_or(20_000, |s| s.parse().expect("gs-limit"));
    for order in [20, 24, 28] {
        let mut seen = HashMap::new();
        let mut kept: Vec<(CatalogEntry, String)> = Vec::new();
        let all = candidates(order, gs_limit);
        let total = all.len();
        for (label, recipe, h) in all {
            assert!(h.is_hadamard() && h.order() == order, "{recipe}");
            if seen.insert(four_profile(&h), label.clone()).is_some() {
                continue;
            }
            eprintln!("order {order}: {recipe} rank {}", dephased_rank(&h));
            let entry = CatalogEntry {
                order,
                class_label: format!("{label}.txt"),
                source: EntrySource::Vendored,
                matrix: h,
            };
            kept.push((entry, recipe));
        }
        let manifest = Manifest {
            records: kept
                .iter()
                .map(|(e, recipe)| ManifestRecord {
                    order,
                    class_label: e.class_label.clone(),
                    url: format!("construction:{recipe}"),
                    content_hash: content_hash(to_sign_text(&e.matrix).as_bytes()),
                })
                .collect(),
        };
        let entries: Vec<CatalogEntry> = kept.into_iter().map(|(e, _)| e).collect();
        let dir = out.join(format!("order-{order}"));
        write_dir(&dir, &manifest, &entries).expect("write fixtures");
        println!("order {order}: {} inequivalent of {total} candidates in {}", entries.len(), dir.display());
    }
}
