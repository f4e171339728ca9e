#pragma once

#include "lazylearn/trainer.hpp"

#include <iosfwd>
#include <string>

namespace lazylearn {

// Fixed metrics CSV header; columns never move.
extern const char* const kMetricsCsvHeader;

// Doubles are printed with round-trip precision (%.17g); absent
// optionals become empty CSV fields / JSON nulls.
std::string metrics_csv_row(const MetricsRecord& rec);
std::string metrics_json_line(const MetricsRecord& rec);

// Incremental writers for one run's stream. Rows are flushed as they
// arrive so an aborted run leaves a readable prefix.
class MetricsCsvWriter {
public:
    explicit MetricsCsvWriter(const std::string& path);
    ~MetricsCsvWriter();
    MetricsCsvWriter(const MetricsCsvWriter&) = delete;
    MetricsCsvWriter& operator=(const MetricsCsvWriter&) = delete;

    void write(const MetricsRecord& rec);

private:
    struct Impl;
    Impl* impl_;
};

class MetricsJsonlWriter {
public:
    explicit MetricsJsonlWriter(const std::string& path);
    ~MetricsJsonlWriter();
    MetricsJsonlWriter(const MetricsJsonlWriter&) = delete;
    MetricsJsonlWriter& operator=(const MetricsJsonlWriter&) = delete;

    void write(const MetricsRecord& rec);

private:
    struct Impl;
    Impl* impl_;
};

// Whole-run summary as a single JSON document.
std::string summary_json(const RunSummary& summary, const TrainConfig& config);
void write_summary_json(const RunSummary& summary, const TrainConfig& config,
                        const std::string& path);

// Remembered sample ids as a JSON array (coreset workflows).
void write_coreset_ids_json(const std::vector<std::int64_t>& ids, const std::string& path);
std::vector<std::int64_t> read_coreset_ids_json(const std::string& path);

} // namespace lazylearn
