import json

from geoeval.cli import main

from conftest import TOY_DUMP_LINES, write_brat_doc


def _ann_for(text, surface, type_, norm=None, extra=""):
    start = text.index(surface)
    lines = [f"T1\t{type_} {start} {start + len(surface)}\t{surface}"]
    if norm:
        lines.append(f"N1\tReference T1 {norm}\t{surface}")
    if extra:
        lines.append(extra)
    return "\n".join(lines) + "\n"


def build_corpus(tmp_path):
    gold = tmp_path / "gold"
    gold.mkdir()
    write_brat_doc(gold, "doc1", "Paris hosted the summit.",
                   _ann_for("Paris hosted the summit.", "Paris", "Literal", "Geonames:1004"))
    write_brat_doc(gold, "doc2", "London called again.",
                   _ann_for("London called again.", "London", "Literal", "Geonames:1005"))
    write_brat_doc(gold, "doc3", "Melbourne winters are mild.",
                   _ann_for("Melbourne winters are mild.", "Melbourne", "Literal", "Geonames:1001"))
    write_brat_doc(gold, "doc4", "Vancouver rain continued.",
                   _ann_for("Vancouver rain continued.", "Vancouver", "Literal", "Geonames:1006"))
    # doc5: one kept toponym plus a coordinate-less demonym (excluded).
    text5 = "Nice beaches were empty. Russians arrived."
    r_start = text5.index("Russians")
    ann5 = (
        f"T1\tLiteral 0 4\tNice\nN1\tReference T1 Geonames:1008\tNice\n"
        f"T2\tDemonym {r_start} {r_start + 8}\tRussians\n"
    )
    write_brat_doc(gold, "doc5", text5, ann5)
    # doc6: facility with a dangling gazetteer id (excluded).
    write_brat_doc(gold, "doc6", "He sat in FacHall today.",
                   _ann_for("He sat in FacHall today.", "FacHall", "Coercion", "Geonames:999777"))
    return gold


def build_cache(tmp_path):
    dump = tmp_path / "dump.tsv"
    dump.write_text("\n".join(TOY_DUMP_LINES) + "\n", encoding="utf-8")
    cache = tmp_path / "gaz.cache"
    assert main(["ingest", "--dump", str(dump), "--cache", str(cache)]) == 0
    return dump, cache


def test_ingest_counts_and_cache_hit(tmp_path, capsys):
    dump = tmp_path / "dump.tsv"
    dump.write_text("\n".join(TOY_DUMP_LINES + ["corrupt line"]) + "\n", encoding="utf-8")
    cache = tmp_path / "gaz.cache"
    assert main(["ingest", "--dump", str(dump), "--cache", str(cache)]) == 0
    out = capsys.readouterr().out
    assert f"{len(TOY_DUMP_LINES)} ingested" in out
    assert "1 skipped" in out

    assert main(["ingest", "--dump", str(dump), "--cache", str(cache)]) == 0
    assert "cache hit" in capsys.readouterr().out


def test_ingest_feature_class_filter(tmp_path, capsys):
    dump = tmp_path / "dump.tsv"
    dump.write_text("\n".join(TOY_DUMP_LINES) + "\n", encoding="utf-8")
    cache = tmp_path / "gaz2.cache"
    assert main(["ingest", "--dump", str(dump), "--cache", str(cache), "--feature-classes", "P"]) == 0
    assert "filtered" in capsys.readouterr().out


def test_baseline_oracle_population_then_eval(tmp_path, capsys):
    gold = build_corpus(tmp_path)
    _, cache = build_cache(tmp_path)
    pred = tmp_path / "oracle.pred"
    assert main([
        "baseline", "--gold", str(gold), "--cache", str(cache),
        "--oracle-ner", "--out", str(pred),
    ]) == 0
    out = capsys.readouterr().out
    assert "7 total, 5 kept" in out
    assert "5 spans, 5 resolved" in out

    lines = pred.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 5

    report_path = tmp_path / "tagging.report"
    assert main([
        "eval-tagging", "--gold", str(gold), "--pred", str(pred),
        "--cache", str(cache), "--out", str(report_path),
    ]) == 0
    report = report_path.read_text(encoding="utf-8")
    assert "f_score: 1.000000" in report
    assert "gazetteer_version: sha256:" in report
    assert "dataset_id: gold" in report

    geo_report_path = tmp_path / "geocoding.report"
    assert main([
        "eval-geocoding", "--gold", str(gold), "--pred", str(pred),
        "--cache", str(cache), "--out", str(geo_report_path),
    ]) == 0
    geo_report = geo_report_path.read_text(encoding="utf-8")
    assert "mean_error_km: 0.0000" in geo_report
    assert "auc: 0.000000" in geo_report
    assert "accuracy_at_161km: 1.000000" in geo_report
    assert "n_resolved: 5" in geo_report


def test_eval_tagging_empty_predictions(tmp_path):
    gold = build_corpus(tmp_path)
    pred = tmp_path / "empty.pred"
    pred.write_text("", encoding="utf-8")
    report_path = tmp_path / "report.txt"
    assert main([
        "eval-tagging", "--gold", str(gold), "--pred", str(pred), "--out", str(report_path),
    ]) == 0
    report = report_path.read_text(encoding="utf-8")
    assert "recall: 0.000000" in report
    assert "gazetteer_version: none" in report


def test_eval_tagging_without_cache_counts_all_annotations(tmp_path):
    gold = build_corpus(tmp_path)
    pred = tmp_path / "p.pred"
    pred.write_text("doc1\t0\t5\tParis\tLocation\t\t\n", encoding="utf-8")
    report_path = tmp_path / "report.txt"
    assert main(["eval-tagging", "--gold", str(gold), "--pred", str(pred), "--out", str(report_path)]) == 0
    assert "n_gold: 7" in report_path.read_text(encoding="utf-8")


def test_eval_tagging_mcnemar_comparison(tmp_path, capsys):
    gold = build_corpus(tmp_path)
    _, cache = build_cache(tmp_path)
    pred_a = tmp_path / "a.pred"
    assert main([
        "baseline", "--gold", str(gold), "--cache", str(cache), "--oracle-ner",
        "--out", str(pred_a),
    ]) == 0
    # System B misses doc2 and doc3.
    lines = pred_a.read_text(encoding="utf-8").splitlines()
    pred_b = tmp_path / "b.pred"
    pred_b.write_text(
        "\n".join(l for l in lines if not l.startswith(("doc2", "doc3"))) + "\n",
        encoding="utf-8",
    )
    report_path = tmp_path / "cmp.report"
    assert main([
        "eval-tagging", "--gold", str(gold), "--pred", str(pred_a),
        "--pred-b", str(pred_b), "--cache", str(cache), "--out", str(report_path),
    ]) == 0
    out = capsys.readouterr().out
    assert "mcnemar:" in out
    assert "stat_test: mcnemar" in report_path.read_text(encoding="utf-8")


def test_eval_geocoding_low_resolution_warning(tmp_path):
    gold = build_corpus(tmp_path)
    _, cache = build_cache(tmp_path)
    # All five kept toponyms matched, but only two carry coordinates: 40%.
    pred = tmp_path / "partial.pred"
    pred.write_text(
        "doc1\t0\t5\tParis\tLocation\t48.856600\t2.352200\n"
        "doc2\t0\t6\tLondon\tLocation\t51.507400\t-0.127800\n"
        "doc3\t0\t9\tMelbourne\tLocation\t\t\n"
        "doc4\t0\t9\tVancouver\tLocation\t\t\n"
        "doc5\t0\t4\tNice\tLocation\t\t\n",
        encoding="utf-8",
    )
    report_path = tmp_path / "geo.report"
    assert main([
        "eval-geocoding", "--gold", str(gold), "--pred", str(pred),
        "--cache", str(cache), "--out", str(report_path),
    ]) == 0
    report = report_path.read_text(encoding="utf-8")
    assert "below the 50% representativeness minimum" in report
    assert "n_resolved: 2" in report


def test_eval_geocoding_wilcoxon_comparison(tmp_path, capsys):
    gold = build_corpus(tmp_path)
    _, cache = build_cache(tmp_path)
    pred_a = tmp_path / "a.pred"
    assert main([
        "baseline", "--gold", str(gold), "--cache", str(cache), "--oracle-ner",
        "--out", str(pred_a),
    ]) == 0
    # System B: same spans, coordinates nudged north by ~0.5 degrees.
    rows = []
    for line in pred_a.read_text(encoding="utf-8").splitlines():
        fields = line.split("\t")
        fields[5] = f"{float(fields[5]) + 0.5:.6f}"
        rows.append("\t".join(fields))
    pred_b = tmp_path / "b.pred"
    pred_b.write_text("\n".join(rows) + "\n", encoding="utf-8")
    report_path = tmp_path / "wil.report"
    assert main([
        "eval-geocoding", "--gold", str(gold), "--pred", str(pred_a),
        "--pred-b", str(pred_b), "--cache", str(cache), "--out", str(report_path),
    ]) == 0
    out = capsys.readouterr().out
    assert "wilcoxon:" in out
    report = report_path.read_text(encoding="utf-8")
    assert "stat_test: wilcoxon" in report
    # A is uniformly better, so z must be negative (errors_a < errors_b).
    z_line = next(l for l in out.splitlines() if l.startswith("wilcoxon:"))
    assert "z=-" in z_line


def test_align_subcommand(tmp_path, capsys):
    _, cache = build_cache(tmp_path)
    pred = tmp_path / "foreign.pred"
    pred.write_text(
        "doc1\t0\t9\tVancouver\tLocation\t49.280000\t-123.120000\n"
        "doc2\t0\t6\tGondor\tLocation\t1.000000\t1.000000\n",
        encoding="utf-8",
    )
    out_file = tmp_path / "aligned.pred"
    assert main(["align", "--pred", str(pred), "--cache", str(cache), "--out", str(out_file)]) == 0
    out = capsys.readouterr().out
    assert "aligned 1 of 2" in out
    assert "flagged 1" in out
    aligned = out_file.read_text(encoding="utf-8").splitlines()
    assert aligned[0].split("\t")[5] == "49.282700"  # snapped to Vancouver CA
    assert aligned[1].split("\t")[5] == "1.000000"  # passed through


def test_folds_subcommand(tmp_path, capsys):
    gold = tmp_path / "many"
    gold.mkdir()
    for i in range(200):
        write_brat_doc(gold, f"doc{i:03d}", "Paris here.", "T1\tLiteral 0 5\tParis\n")
    plan_path = tmp_path / "plan.json"
    assert main(["folds", "--gold", str(gold), "--k", "5", "--seed", "11", "--out", str(plan_path)]) == 0
    plan = json.loads(plan_path.read_text(encoding="utf-8"))
    assert plan["k"] == 5 and plan["seed"] == 11
    assert [len(f) for f in plan["folds"]] == [40] * 5
    all_ids = [doc_id for fold in plan["folds"] for doc_id in fold]
    assert len(set(all_ids)) == 200

    # Same seed reproduces the identical plan.
    plan2_path = tmp_path / "plan2.json"
    assert main(["folds", "--gold", str(gold), "--k", "5", "--seed", "11", "--out", str(plan2_path)]) == 0
    assert json.loads(plan2_path.read_text(encoding="utf-8")) == plan


def test_augment_subcommand(tmp_path, capsys):
    gold = build_corpus(tmp_path)
    text = "The crowd reached the old square quickly."
    start = text.index("the old square")
    ann = (
        f"T1\tLiteralExpression {start} {start + len('the old square')}\tthe old square\n"
        "A1\tnon_locational T1 False\n"
    )
    write_brat_doc(gold, "doc7", text, ann)
    out_file = tmp_path / "augmented.conll"
    assert main([
        "augment", "--gold", str(gold), "--max-per-source", "3", "--seed", "4",
        "--out", str(out_file),
    ]) == 0
    out = capsys.readouterr().out
    assert "tagged sentences" in out
    content = out_file.read_text(encoding="utf-8")
    assert "\tB-Literal" in content


def test_baseline_lexicon_resolves_adjectival_surfaces(tmp_path):
    gold = tmp_path / "adj_gold"
    gold.mkdir()
    text = "Russian officials spoke."
    write_brat_doc(
        gold, "doc1", text,
        _ann_for(text, "Russian", "NonLitModifier", "Geonames:1009",
                 extra="A2\tmodifier_type T1 Adjective"),
    )
    _, cache = build_cache(tmp_path)
    lexicon = tmp_path / "lexicon.tsv"
    lexicon.write_text("Russian\tRussia\n", encoding="utf-8")

    without = tmp_path / "without.pred"
    assert main(["baseline", "--gold", str(gold), "--cache", str(cache),
                 "--oracle-ner", "--out", str(without)]) == 0
    assert without.read_text(encoding="utf-8").split("\t")[5] == ""  # unresolved

    with_lex = tmp_path / "with.pred"
    assert main(["baseline", "--gold", str(gold), "--cache", str(cache),
                 "--oracle-ner", "--lexicon", str(lexicon), "--out", str(with_lex)]) == 0
    fields = with_lex.read_text(encoding="utf-8").split("\t")
    assert fields[5] == "61.524000"  # resolved to the country entry


def test_eval_tagging_overlap_mode(tmp_path):
    gold = build_corpus(tmp_path)
    pred = tmp_path / "shifted.pred"
    # One-character-short span over "Paris": overlap credits it, exact does not.
    pred.write_text("doc1\t0\t4\tPari\tLocation\t\t\n", encoding="utf-8")
    report = tmp_path / "r.txt"
    assert main(["eval-tagging", "--gold", str(gold), "--pred", str(pred),
                 "--mode", "overlap", "--out", str(report)]) == 0
    assert "tp: 1" in report.read_text(encoding="utf-8")
    assert main(["eval-tagging", "--gold", str(gold), "--pred", str(pred),
                 "--mode", "exact", "--out", str(report)]) == 0
    assert "tp: 0" in report.read_text(encoding="utf-8")


def test_missing_gold_dir_is_input_error(tmp_path, capsys):
    report = tmp_path / "r.txt"
    code = main(["eval-tagging", "--gold", str(tmp_path / "nope"), "--pred", "x", "--out", str(report)])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_malformed_predictions_strict_vs_lenient(tmp_path, capsys):
    gold = build_corpus(tmp_path)
    pred = tmp_path / "bad.pred"
    pred.write_text("doc1\t0\t5\tParis\tLocation\t\t\nnot a record\n", encoding="utf-8")
    report = tmp_path / "r.txt"
    assert main(["eval-tagging", "--gold", str(gold), "--pred", str(pred), "--out", str(report)]) == 1
    capsys.readouterr()
    assert main([
        "eval-tagging", "--gold", str(gold), "--pred", str(pred), "--out", str(report), "--lenient",
    ]) == 0


def test_csv_row_appended(tmp_path):
    gold = build_corpus(tmp_path)
    pred = tmp_path / "p.pred"
    pred.write_text("doc1\t0\t5\tParis\tLocation\t\t\n", encoding="utf-8")
    report = tmp_path / "r.txt"
    csv_path = tmp_path / "rows.csv"
    for _ in range(2):
        assert main([
            "eval-tagging", "--gold", str(gold), "--pred", str(pred),
            "--out", str(report), "--csv", str(csv_path),
        ]) == 0
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("dataset_id,gazetteer_version,")
    assert len(lines) == 3  # header + two rows


def test_config_file_supplies_defaults(tmp_path):
    gold = build_corpus(tmp_path)
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"k": 3, "seed": 21}), encoding="utf-8")
    plan_path = tmp_path / "plan.json"
    assert main([
        "--config", str(config), "folds", "--gold", str(gold), "--out", str(plan_path),
    ]) == 0
    plan = json.loads(plan_path.read_text(encoding="utf-8"))
    assert plan["k"] == 3 and plan["seed"] == 21
