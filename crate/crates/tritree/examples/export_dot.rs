//! Save a fitted trinary tree as canonical JSON and Graphviz DOT.
//!
//! The DOT output draws middle (in-zone) edges dashed; render it with
//! `dot -Tpng tree.dot -o tree.png` if Graphviz is installed. The JSON file
//! round-trips through `bench export-tree --model tree.json --format json`.
//!
//! ```text
//! cargo run --release -p tritree --example export_dot
//! ```

use tritree::bench::{export_tree, ExportFormat};
use tritree::{fit, Architecture, DeltaMethod, FitParams};

fn main() -> tritree::Result<()> {
    let data = tritree::data::gen_two_moons(400, 0.3, 42);
    let params = FitParams::new(DeltaMethod::margin(), Architecture::Trinary).with_max_depth(2);
    let tree = fit(&data, &params)?;

    std::fs::write("tree.json", export_tree(&tree, ExportFormat::Json))
        .map_err(|e| tritree::Error::io("tree.json", e))?;
    std::fs::write("tree.dot", export_tree(&tree, ExportFormat::Dot))
        .map_err(|e| tritree::Error::io("tree.dot", e))?;
    println!(
        "wrote tree.json and tree.dot (depth {}, {} nodes)",
        tree.depth(),
        tree.node_count()
    );
    Ok(())
}
