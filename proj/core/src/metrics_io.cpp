#include "lazylearn/metrics_io.hpp"

#include "lazylearn/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace lazylearn {
namespace {

using nlohmann::json;

// Round-trip formatting: 17 significant digits reproduce the double
// bit-for-bit on re-parse.
std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json record_to_json(const MetricsRecord& rec) {
    json j;
    j["samples_seen"] = rec.samples_seen;
    j["epoch"] = rec.epoch;
    j["train_loss"] = rec.train_loss;
    j["test_loss"] = rec.test_loss;
    j["train_acc"] = rec.train_accuracy;
    j["test_acc"] = rec.test_accuracy;
    j["m_total"] = rec.m_total;
    j["m_min"] = rec.m_min;
    j["ineff"] = rec.inefficiency ? json(*rec.inefficiency) : json(nullptr);
    j["updates"] = rec.update_count;
    j["remembered_frac"] =
        rec.remembered_fraction ? json(*rec.remembered_fraction) : json(nullptr);
    return j;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw io_error("cannot open " + path + " for writing");
    }
    return out;
}

} // namespace

const char* const kMetricsCsvHeader =
    "samples_seen,epoch,train_loss,test_loss,train_acc,test_acc,"
    "m_total,m_min,ineff,updates,remembered_frac";

std::string metrics_csv_row(const MetricsRecord& rec) {
    std::string row;
    row += std::to_string(rec.samples_seen);
    row += ',';
    row += std::to_string(rec.epoch);
    row += ',';
    row += fmt_double(rec.train_loss);
    row += ',';
    row += fmt_double(rec.test_loss);
    row += ',';
    row += fmt_double(rec.train_accuracy);
    row += ',';
    row += fmt_double(rec.test_accuracy);
    row += ',';
    row += fmt_double(rec.m_total);
    row += ',';
    row += fmt_double(rec.m_min);
    row += ',';
    if (rec.inefficiency) {
        row += fmt_double(*rec.inefficiency);
    }
    row += ',';
    row += std::to_string(rec.update_count);
    row += ',';
    if (rec.remembered_fraction) {
        row += fmt_double(*rec.remembered_fraction);
    }
    return row;
}

std::string metrics_json_line(const MetricsRecord& rec) {
    return record_to_json(rec).dump();
}

struct MetricsCsvWriter::Impl {
    std::ofstream out;
};

MetricsCsvWriter::MetricsCsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->out = open_for_write(path);
    impl_->out << kMetricsCsvHeader << '\n';
    impl_->out.flush();
}

MetricsCsvWriter::~MetricsCsvWriter() {
    delete impl_;
}

void MetricsCsvWriter::write(const MetricsRecord& rec) {
    impl_->out << metrics_csv_row(rec) << '\n';
    impl_->out.flush();
}

struct MetricsJsonlWriter::Impl {
    std::ofstream out;
};

MetricsJsonlWriter::MetricsJsonlWriter(const std::string& path) : impl_(new Impl) {
    impl_->out = open_for_write(path);
}

MetricsJsonlWriter::~MetricsJsonlWriter() {
    delete impl_;
}

void MetricsJsonlWriter::write(const MetricsRecord& rec) {
    impl_->out << metrics_json_line(rec) << '\n';
    impl_->out.flush();
}

std::string summary_json(const RunSummary& summary, const TrainConfig& config) {
    json j;
    j["status"] = to_string(summary.status);
    if (!summary.diagnostic.empty()) {
        j["diagnostic"] = summary.diagnostic;
    }
    j["config"] = {
        {"rule", to_string(config.rule)},
        {"learning_rate", config.learning_rate},
        {"epochs", config.epochs},
        {"eval_every", config.eval_every},
        {"stop_test_accuracy",
         config.stop_test_accuracy ? json(*config.stop_test_accuracy) : json(nullptr)},
        {"seed", config.seed},
        {"hidden_dim", config.hidden_dim},
        {"remember_preset_all", config.remember_preset_all},
    };
    j["step_count"] = summary.step_count;
    j["update_count"] = summary.update_count;
    j["efficiency"] = {
        {"m", summary.efficiency.m},
        {"m_min", summary.efficiency.m_min},
        {"ineff", summary.efficiency.ineff ? json(*summary.efficiency.ineff) : json(nullptr)},
    };
    if (summary.final_record) {
        j["final"] = record_to_json(*summary.final_record);
    }
    if (summary.remembered_fraction) {
        j["remembered"] = {
            {"fraction", *summary.remembered_fraction},
            {"count", summary.coreset_ids.size()},
            {"sample_ids", summary.coreset_ids},
        };
    }
    return j.dump(2);
}

void write_summary_json(const RunSummary& summary, const TrainConfig& config,
                        const std::string& path) {
    auto out = open_for_write(path);
    out << summary_json(summary, config) << '\n';
    if (!out) {
        throw io_error("error while writing " + path);
    }
}

void write_coreset_ids_json(const std::vector<std::int64_t>& ids, const std::string& path) {
    auto out = open_for_write(path);
    out << json(ids).dump() << '\n';
    if (!out) {
        throw io_error("error while writing " + path);
    }
}

std::vector<std::int64_t> read_coreset_ids_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw format_error("invalid JSON in " + path + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw format_error(path + ": expected a JSON array of sample ids");
    }
    return doc.get<std::vector<std::int64_t>>();
}

} // namespace lazylearn
