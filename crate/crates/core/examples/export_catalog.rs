//! Writes the built-in catalog as `.hkd` files under `catalog/`.

use std::fs;
use std::path::Path;

use hkinv::diagram::{catalog, DiagramCode};

fn write(dir: &Path, d: &DiagramCode) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.hkd", d.display_name()));
    fs::write(&path, d.to_string())?;
    println!("{}", path.display());
    Ok(())
}

fn main() -> std::io::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog");
    for e in catalog::entries() {
        write(&root, &e.diagram)?;
    }
    for m in catalog::reidemeister_pairs() {
        write(&root.join("moves"), &m.before)?;
        write(&root.join("moves"), &m.after)?;
    }
    let mut links = vec![catalog::empty_link()];
    for m in catalog::kirby_pairs() {
        links.extend([m.before, m.after]);
    }
    links.extend(catalog::double_cases().into_iter().map(|(_, l)| l));
    links.sort_by(|a, b| a.display_name().cmp(b.display_name()));
    links.dedup_by(|a, b| a.display_name() == b.display_name());
    for l in &links {
        write(&root.join("links"), l)?;
    }
    Ok(())
}
