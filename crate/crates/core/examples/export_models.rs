//! Writes the reference models as JSON files into the given directory.

use std::path::PathBuf;

use ioconf::catalog;
use ioconf::runner::{alpha_implementation, Variant};

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "models".into()));
    std::fs::create_dir_all(&dir).expect("create output directory");
    let models = [
        ("tau_loop_lts", catalog::tau_loop_lts()),
        ("coffee_machine", catalog::coffee_machine()),
        ("conf_spec", catalog::conf_spec()),
        ("conf_impl", catalog::conf_impl()),
        ("conf_impl_extra_output", catalog::conf_impl_extra_output()),
        ("ioco_spec", catalog::ioco_spec()),
        ("ioco_impl", catalog::ioco_impl()),
        ("quiescence_base", catalog::quiescence_base()),
        ("parity_spec", catalog::parity_spec()),
        ("ring_spec", catalog::ring_spec(4)),
        ("alpha_impl_0110", alpha_implementation(&[0, 1, 1, 0], Variant::Schemes)),
        ("single_loop_spec", catalog::single_loop_spec()),
    ];
    for (name, model) in models {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, model.to_json() + "\n").expect("write model");
        println!("{}", path.display());
    }
}
