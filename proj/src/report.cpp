#include "ganbench/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ganbench/errors.hpp"
#include "ganbench/plot.hpp"

namespace ganbench {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string display_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::VANILLA: return "Vanilla GAN";
        case ModelFamily::DCGAN: return "DCGAN";
        case ModelFamily::WGAN: return "WGAN";
    }
    return "?";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot write " + path.string());
    out << text;
}

nlohmann::ordered_json snapshot_json(const MetricSnapshot& m) {
    nlohmann::ordered_json j;
    j["epoch"] = m.epoch;
    j["ssim_mean"] = m.ssim_mean;
    j["ssim_std"] = m.ssim_std;
    j["psnr_mean"] = m.psnr_mean;
    j["psnr_std"] = m.psnr_std;
    j["is_mean"] = m.is_mean;
    j["is_std"] = m.is_std;
    j["pairing"] = m.pairing;
    j["n_images"] = m.n_images;
    return j;
}

MetricSnapshot snapshot_from_json(const nlohmann::json& j) {
    MetricSnapshot m;
    m.epoch = j.at("epoch").get<int>();
    m.ssim_mean = j.at("ssim_mean").get<double>();
    m.ssim_std = j.at("ssim_std").get<double>();
    m.psnr_mean = j.at("psnr_mean").get<double>();
    m.psnr_std = j.at("psnr_std").get<double>();
    m.is_mean = j.at("is_mean").get<double>();
    m.is_std = j.at("is_std").get<double>();
    m.pairing = j.at("pairing").get<std::string>();
    m.n_images = j.at("n_images").get<int>();
    return m;
}

struct SeriesColor {
    unsigned char r, g, b;
};

SeriesColor family_color(ModelFamily f) {
    switch (f) {
        case ModelFamily::VANILLA: return {214, 39, 40};
        case ModelFamily::DCGAN: return {31, 119, 180};
        case ModelFamily::WGAN: return {44, 160, 44};
    }
    return {0, 0, 0};
}

void write_curve(const std::filesystem::path& path, const std::vector<RunSummary>& runs,
                 const std::string& title, const std::string& y_label,
                 double MetricSnapshot::*field) {
    std::vector<plot::Series> series;
    for (const auto& run : runs) {
        plot::Series s;
        s.label = run.run_id;
        const auto c = family_color(run.family);
        s.r = c.r;
        s.g = c.g;
        s.b = c.b;
        for (const auto& rec : run.log) {
            if (!rec.metric_snapshot) continue;
            s.x.push_back(rec.epoch);
            s.y.push_back((*rec.metric_snapshot).*field);
        }
        series.push_back(std::move(s));
    }
    plot::ChartOptions opts;
    opts.title = title;
    opts.x_label = "epoch";
    opts.y_label = y_label;
    plot::write_line_chart(path, series, opts);
}

}  // namespace

nlohmann::ordered_json hyper_to_json(const Hyperparameters& h) {
    nlohmann::ordered_json j;
    j["family"] = to_string(h.family);
    j["latent_dim"] = h.latent_dim;
    j["batch_size"] = h.batch_size;
    j["epochs"] = h.epochs;
    j["lr_generator"] = h.lr_generator;
    j["lr_discriminator"] = h.lr_discriminator;
    j["optimizer"] = h.optimizer;
    j["adam_beta1"] = h.adam_beta1;
    j["adam_beta2"] = h.adam_beta2;
    j["clip_c"] = h.clip_c;
    j["n_critic"] = h.n_critic;
    j["eval_every"] = h.eval_every;
    j["saturating_generator_loss"] = h.saturating_generator_loss;
    j["gen_base_filters"] = h.model.gen_base_filters;
    j["disc_base_filters"] = h.model.disc_base_filters;
    j["leaky_slope"] = h.model.leaky_slope;
    j["dropout_prob"] = h.model.dropout_prob;
    return j;
}

Hyperparameters hyper_from_json(const nlohmann::json& j) {
    Hyperparameters h;
    h.family = family_from_string(j.at("family").get<std::string>());
    h.latent_dim = j.at("latent_dim").get<int>();
    h.batch_size = j.at("batch_size").get<int>();
    h.epochs = j.at("epochs").get<int>();
    h.lr_generator = j.at("lr_generator").get<double>();
    h.lr_discriminator = j.at("lr_discriminator").get<double>();
    h.optimizer = j.at("optimizer").get<std::string>();
    h.adam_beta1 = j.at("adam_beta1").get<double>();
    h.adam_beta2 = j.at("adam_beta2").get<double>();
    h.clip_c = j.at("clip_c").get<double>();
    h.n_critic = j.at("n_critic").get<int>();
    h.eval_every = j.at("eval_every").get<int>();
    h.saturating_generator_loss = j.at("saturating_generator_loss").get<bool>();
    h.model.gen_base_filters = j.at("gen_base_filters").get<int>();
    h.model.disc_base_filters = j.at("disc_base_filters").get<int>();
    h.model.leaky_slope = j.at("leaky_slope").get<double>();
    h.model.dropout_prob = j.at("dropout_prob").get<double>();
    return h;
}

nlohmann::ordered_json run_manifest_json(const TrainRun& run) {
    nlohmann::ordered_json j;
    j["run_id"] = run.run_id;
    j["family"] = to_string(run.hyper.family);
    j["seed"] = run.seed;
    j["hyperparameters"] = hyper_to_json(run.hyper);
    j["dataset_ref"] = run.dataset_ref;
    j["architecture"] = {{"generator", run.generator_spec.to_json()},
                         {"discriminator", run.discriminator_spec.to_json()}};
    j["epoch_count"] = static_cast<int>(run.epoch_records.size());
    j["wall_time"] = run.wall_time_sec;
    const MetricSnapshot* last = nullptr;
    for (const auto& rec : run.epoch_records)
        if (rec.metric_snapshot) last = &*rec.metric_snapshot;
    if (last) j["final_metrics"] = snapshot_json(*last);
    else j["final_metrics"] = nullptr;
    return j;
}

void write_run_manifest(const TrainRun& run, const std::filesystem::path& path) {
    write_text_file(path, run_manifest_json(run).dump(2) + "\n");
}

std::vector<EpochRecord> read_training_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw CorruptFile("empty training log " + path.string());
    std::vector<EpochRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        cols.resize(9);
        EpochRecord rec;
        rec.epoch = std::stoi(cols[0]);
        rec.g_loss = std::stod(cols[1]);
        rec.d_loss = std::stod(cols[2]);
        if (!cols[3].empty()) {
            MetricSnapshot m;
            m.epoch = rec.epoch;
            m.ssim_mean = std::stod(cols[3]);
            m.ssim_std = std::stod(cols[4]);
            m.psnr_mean = std::stod(cols[5]);
            m.psnr_std = std::stod(cols[6]);
            m.is_mean = std::stod(cols[7]);
            m.is_std = std::stod(cols[8]);
            rec.metric_snapshot = m;
        }
        records.push_back(rec);
    }
    return records;
}

RunSummary load_run(const std::filesystem::path& run_dir) {
    const auto manifest_path = run_dir / "run.json";
    std::ifstream in(manifest_path);
    if (!in) throw MissingRuns("no run.json in " + run_dir.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptFile("bad run.json in " + run_dir.string() + ": " + e.what());
    }
    RunSummary run;
    run.dir = run_dir;
    run.run_id = j.at("run_id").get<std::string>();
    run.family = family_from_string(j.at("family").get<std::string>());
    run.seed = j.at("seed").get<std::uint64_t>();
    run.hyper = hyper_from_json(j.at("hyperparameters"));
    run.dataset_ref = j.at("dataset_ref").get<std::string>();
    run.epoch_count = j.at("epoch_count").get<int>();
    run.wall_time_sec = j.at("wall_time").get<double>();
    if (!j.at("final_metrics").is_null()) run.final_metrics = snapshot_from_json(j["final_metrics"]);
    const auto log_path = run_dir / "training_log.csv";
    if (std::filesystem::exists(log_path)) run.log = read_training_log(log_path);
    return run;
}

std::string render_comparison_md(const std::vector<RunSummary>& runs) {
    std::ostringstream os;
    os << "# Model Comparison\n\n";
    os << "Final-epoch metrics per run, mean +/- std over the test split.\n\n";
    os << "| Model | Run | SSIM | PSNR (dB) | IS |\n";
    os << "| --- | --- | --- | --- | --- |\n";
    for (const auto& run : runs) {
        os << "| " << display_name(run.family) << " | " << run.run_id << " | ";
        if (run.final_metrics) {
            const auto& m = *run.final_metrics;
            os << fmt("%.2f", m.ssim_mean) << "&plusmn;" << fmt("%.3f", m.ssim_std) << " | "
               << fmt("%.2f", m.psnr_mean) << "&plusmn;" << fmt("%.3f", m.psnr_std) << " | "
               << fmt("%.2f", m.is_mean) << "&plusmn;" << fmt("%.3f", m.is_std) << " |\n";
        } else {
            os << "n/a | n/a | n/a |\n";
        }
    }
    return os.str();
}

std::string render_stats_md(const std::vector<SignificanceReport>& reports) {
    std::ostringstream os;
    os << "# Statistical Significance\n\n";
    if (reports.empty()) {
        os << "Statistics skipped: fewer than two runs available (ANOVA needs >= 2 groups).\n";
        return os.str();
    }
    for (const auto& rep : reports) {
        os << "## " << rep.metric << "\n\n";
        os << "One-way ANOVA: F(" << rep.anova.df_between << ", " << rep.anova.df_within
           << ") = " << fmt("%.4f", rep.anova.f_value) << ", p = " << fmt("%.6g", rep.anova.p_value)
           << "\n\n";
        os << "| Pair | Mean Diff | Q | Critical Q | Significant |\n";
        os << "| --- | --- | --- | --- | --- |\n";
        for (const auto& p : rep.pairs) {
            os << "| " << p.group_a << " vs " << p.group_b << " | " << fmt("%.4f", p.mean_diff)
               << " | " << fmt("%.4f", p.q_value) << " | " << fmt("%.4f", p.critical_q) << " | "
               << (p.significant ? "yes" : "no") << " |\n";
        }
        os << "\n";
    }
    return os.str();
}

ReportArtifacts write_benchmark_report(const std::vector<RunSummary>& runs,
                                       const std::vector<SignificanceReport>& stats,
                                       const std::string& config_hash,
                                       const std::filesystem::path& out_dir) {
    if (runs.empty()) throw MissingRuns("report requires at least one completed run");
    std::filesystem::create_directories(out_dir);

    ReportArtifacts art;
    art.curves_ssim = out_dir / "curves_ssim.png";
    art.curves_psnr = out_dir / "curves_psnr.png";
    art.curves_is = out_dir / "curves_is.png";
    art.comparison_md = out_dir / "comparison.md";
    art.stats_json = out_dir / "stats_report.json";
    art.stats_md = out_dir / "stats_report.md";
    art.report_json = out_dir / "report.json";

    write_curve(art.curves_ssim, runs, "ssim over epochs", "ssim", &MetricSnapshot::ssim_mean);
    write_curve(art.curves_psnr, runs, "psnr over epochs", "psnr db", &MetricSnapshot::psnr_mean);
    write_curve(art.curves_is, runs, "inception score over epochs", "is",
                &MetricSnapshot::is_mean);

    write_text_file(art.comparison_md, render_comparison_md(runs));
    write_text_file(art.stats_md, render_stats_md(stats));

    nlohmann::ordered_json stats_json = nlohmann::ordered_json::array();
    for (const auto& rep : stats) stats_json.push_back(to_json(rep));
    write_text_file(art.stats_json, stats_json.dump(2) + "\n");

    nlohmann::ordered_json report;
    report["config_hash"] = config_hash;
    report["runs"] = nlohmann::ordered_json::array();
    for (const auto& run : runs) {
        nlohmann::ordered_json r;
        r["run_id"] = run.run_id;
        r["family"] = to_string(run.family);
        r["seed"] = run.seed;
        r["dir"] = run.dir.generic_string();
        r["source"] = (run.dir / "run.json").generic_string();
        r["final_metrics"] =
            run.final_metrics ? snapshot_json(*run.final_metrics) : nlohmann::ordered_json(nullptr);
        report["runs"].push_back(r);
    }
    report["stats"] = stats_json;
    report["artifacts"] = {{"curves_ssim", art.curves_ssim.generic_string()},
                           {"curves_psnr", art.curves_psnr.generic_string()},
                           {"curves_is", art.curves_is.generic_string()},
                           {"comparison_md", art.comparison_md.generic_string()},
                           {"stats_report_json", art.stats_json.generic_string()},
                           {"stats_report_md", art.stats_md.generic_string()}};
    write_text_file(art.report_json, report.dump(2) + "\n");
    return art;
}

}  // namespace ganbench
