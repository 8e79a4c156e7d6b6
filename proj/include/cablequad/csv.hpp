// Copyright 2026 The cablequad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CABLEQUAD_CSV_HPP_
#define CABLEQUAD_CSV_HPP_

#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

namespace cablequad {

// CSV writer: UTF-8, LF endings, '.' decimal separator, header required.
// Doubles print with %.12g, which keeps byte-identical output for identical
// runs without inflating file size.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    }

    void header(const std::string& line) { out_ << line << '\n'; }

    CsvWriter& field(double v) {
        sep();
        if (v == 0.0) v = 0.0;  // fold negative zero
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        out_ << buf;
        return *this;
    }

    CsvWriter& field(int v) {
        sep();
        out_ << v;
        return *this;
    }

    CsvWriter& field(const std::string& v) {
        sep();
        out_ << v;
        return *this;
    }

    // Optional metric: empty cell when undefined.
    CsvWriter& field(const std::optional<double>& v) {
        if (v) return field(*v);
        sep();
        return *this;
    }

    void end_row() {
        out_ << '\n';
        first_ = true;
    }

private:
    void sep() {
        if (!first_) out_ << ',';
        first_ = false;
    }

    std::ofstream out_;
    bool first_{true};
};

}  // namespace cablequad

#endif  // CABLEQUAD_CSV_HPP_
