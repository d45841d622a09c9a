// Copyright 2026 The kickshape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace kickshape::cli {

/// "%.17e" rendering used for every numeric CSV cell.
std::string num(double v);

/// Comma-separated writer. The first line is a comment carrying the config
/// hash and tool version, the second the column header.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& config_hash, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& values);

    /// Flushes and throws Error(kConfig) if any write failed.
    void close();

private:
    std::string path_;
    std::ofstream out_;
    std::size_t columns_;
};

/// Parsed CSV body: header names and rows of cells, comment lines skipped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace kickshape::cli
