use std::path::{Path, PathBuf};

use hkinv::diagram::{catalog, load, parse_json, to_json, DiagramCode};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog")
}

fn check(dir: &Path, d: &DiagramCode) {
    let path = dir.join(format!("{}.hkd", d.display_name()));
    let on_disk = load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(on_disk.to_string(), d.to_string(), "{} is stale; rerun the export_catalog example", path.display());
}

#[test]
fn shipped_files_match_the_builtin_catalog() {
    for e in catalog::entries() {
        check(&root(), &e.diagram);
    }
    for m in catalog::reidemeister_pairs() {
        check(&root().join("moves"), &m.before);
        check(&root().join("moves"), &m.after);
    }
    for m in catalog::kirby_pairs() {
        check(&root().join("links"), &m.before);
        check(&root().join("links"), &m.after);
    }
}

#[test]
fn json_mirror_loads_like_text() {
    let d = load(root().join("4_1.hkd")).unwrap();
    let dir = std::env::temp_dir().join(format!("hkinv-json-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("4_1.json");
    std::fs::write(&path, to_json(&d)).unwrap();
    let back = load(&path).unwrap();
    assert_eq!(back, d);
    assert_eq!(parse_json(&to_json(&d)).unwrap(), d);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn catalog_genera() {
    for e in catalog::entries() {
        let d = load(root().join(format!("{}.hkd", e.name))).unwrap();
        assert_eq!(d.component_genera(), e.genera);
        assert_eq!(d.genus_and_components(), (e.genus(), e.components));
    }
}
