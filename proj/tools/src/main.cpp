#include "privstruct/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

namespace {

struct CommonOpts {
    std::string config_path;
    std::string backend;
    std::string scope;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t bins = 0;
    std::string out_dir;
    std::string corpus_dir;
    std::string ds_dir;
    std::size_t workers = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "TOML-style config file");
    cmd->add_option("--backend", opts.backend, "heading/extraction backend")
        ->check(CLI::IsMember({"heuristic", "remote"}));
    cmd->add_option("--scope", opts.scope, "disclosure scope for dilution")
        ->check(CLI::IsMember({"local", "global", "floating"}));
    cmd->add_option("--seed", opts.seed, "RNG seed")->each([&](const std::string&) {
        opts.seed_set = true;
    });
    cmd->add_option("--bins", opts.bins, "positional profile bins");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--corpus", opts.corpus_dir, "corpus directory");
    cmd->add_option("--ds", opts.ds_dir, "data-safety declarations directory");
    cmd->add_option("--workers", opts.workers, "parallel policy workers");
}

privstruct::PipelineConfig build_config(const CommonOpts& opts) {
    privstruct::PipelineConfig config;
    if (!opts.config_path.empty()) config = privstruct::config_from_file(opts.config_path);
    if (!opts.backend.empty()) {
        config.heading_backend.kind = opts.backend;
        config.extraction_backend.kind = opts.backend;
    }
    if (!opts.scope.empty()) privstruct::apply_config_entry(config, "scope", opts.scope);
    if (opts.seed_set) config.seed = opts.seed;
    if (opts.bins > 0) config.n_bins = opts.bins;
    if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
    if (!opts.corpus_dir.empty()) config.corpus_dir = opts.corpus_dir;
    if (!opts.ds_dir.empty()) config.ds_dir = opts.ds_dir;
    if (opts.workers > 0) config.workers = opts.workers;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"privacy-policy structure and purpose-compliance auditor"};
    app.require_subcommand(1);

    CommonOpts parse_opts, audit_opts, dpo_opts, bench_opts;
    std::string report_dir;
    std::string teacher_dir, student_dir;
    double aug_fraction = -1.0;

    auto* parse_cmd = app.add_subcommand("parse", "heading fitment report per policy");
    add_common(parse_cmd, parse_opts);

    auto* audit_cmd = app.add_subcommand("audit", "full compliance audit");
    add_common(audit_cmd, audit_opts);

    auto* dpo_cmd = app.add_subcommand("dpo-build", "preference dataset from paired outputs");
    add_common(dpo_cmd, dpo_opts);
    dpo_cmd->add_option("--teacher", teacher_dir, "teacher outputs directory")->required();
    dpo_cmd->add_option("--student", student_dir, "student outputs directory")->required();
    dpo_cmd->add_option("--aug-fraction", aug_fraction, "augmentation fraction");

    auto* bench_cmd = app.add_subcommand("bench", "mention counts vs a reference run");
    add_common(bench_cmd, bench_opts);
    std::string reference_csv;
    bench_cmd->add_option("--reference", reference_csv, "reference results CSV");

    auto* report_cmd = app.add_subcommand("report", "summarize an audit output directory");
    report_cmd->add_option("--out", report_dir, "audit output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (parse_cmd->parsed()) {
            auto result = privstruct::cmd_parse(build_config(parse_opts));
            std::printf("parsed %zu policies, %zu failed\n", result.rows.size(),
                        result.failures.size());
            return result.exit_code;
        }
        if (audit_cmd->parsed()) {
            auto result = privstruct::cmd_audit(build_config(audit_opts));
            std::printf("audited %zu policies, %zu failed\n", result.policies_audited,
                        result.failures.size());
            return result.exit_code;
        }
        if (dpo_cmd->parsed()) {
            auto config = build_config(dpo_opts);
            if (aug_fraction >= 0.0) config.aug_fraction = aug_fraction;
            auto result = privstruct::cmd_dpo_build(config, teacher_dir, student_dir);
            std::printf("%zu chunks, %zu mismatched, %zu pairs (%zu augmented)\n",
                        result.dataset.chunk_count, result.dataset.mismatch_count,
                        result.dataset.pairs.size(), result.dataset.augmented_count);
            return result.exit_code;
        }
        if (bench_cmd->parsed()) {
            auto config = build_config(bench_opts);
            if (!reference_csv.empty()) config.bench_reference = reference_csv;
            auto result = privstruct::cmd_bench(config);
            std::printf("compared %zu policies: items %.2f, purposes %.2f, categories %.2f\n",
                        result.policies_compared, result.avg_item_mentions,
                        result.avg_purpose_mentions, result.avg_purpose_categories);
            return result.exit_code;
        }
        if (report_cmd->parsed()) {
            return privstruct::cmd_report(report_dir);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
