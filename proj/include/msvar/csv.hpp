#pragma once

#include "msvar/model.hpp"

#include <string>

namespace msvar {

/// Strict CSV ingestion: UTF-8, header row, optional leading ISO-8601 date
/// column, numeric cells. Any missing or non-numeric cell aborts with the
/// offending row number and column name.
DatasetT ingest_csv(const std::string& path);

/// 17-significant-digit CSV export, written to a temp file and renamed so a
/// failed run never leaves a corrupt file behind.
void write_dataset_csv(const std::string& path, const DatasetT& data);

/// Same write-then-rename discipline for arbitrary text content.
void write_text_file(const std::string& path, const std::string& content);

std::string format_g17(double v);

}  // namespace msvar
