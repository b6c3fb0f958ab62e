use std::fs;

use cornersim::dsl::default_catalog_dir;
use serde_json::Value;

fn validator() -> jsonschema::Validator {
    let text = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/scenario-schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn as_json(path: &std::path::Path) -> Value {
    let doc: toml::Value = toml::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    serde_json::to_value(doc).unwrap()
}

fn shipped() -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = ["state", "behavior", "evidence"]
        .iter()
        .flat_map(|c| fs::read_dir(default_catalog_dir().join(c)).unwrap())
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

#[test]
fn shipped_scenarios_conform_to_the_published_schema() {
    let v = validator();
    for f in shipped() {
        let doc = as_json(&f);
        let errors: Vec<String> = v.iter_errors(&doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
        assert!(errors.is_empty(), "{}: {errors:?}", f.display());
    }
}

#[test]
fn schema_rejects_what_the_parser_rejects() {
    let v = validator();
    let base = as_json(&default_catalog_dir().join("evidence/luggage-fall.3cs"));
    let mutations: [fn(&mut Value); 5] = [
        |d| d["scenario"]["egospeed"] = 3.0.into(),
        |d| d["schema_version"] = 2.into(),
        |d| d["scenario"]["weather"] = "drizzle".into(),
        |d| d["scenario"]["actors"][0]["true_class"] = "dragon".into(),
        |d| {
            d["scenario"].as_object_mut().unwrap().remove("tn");
        },
    ];
    for (i, m) in mutations.iter().enumerate() {
        let mut d = base.clone();
        m(&mut d);
        assert!(!v.is_valid(&d), "mutation {i} accepted by the schema");
        let text = toml::to_string(&d).unwrap();
        assert!(cornersim::dsl::parse_scenario(text.as_bytes()).is_err(), "mutation {i} accepted by the parser");
    }
}
