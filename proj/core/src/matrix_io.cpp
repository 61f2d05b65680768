#include "netcontract/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace netcontract::io {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view token, std::size_t line) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
        throw Error(ErrorKind::Parse,
                    "line " + std::to_string(line) + ": cannot parse '" + std::string(token) + "' as a number");
    }
    return value;
}

std::vector<double> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const auto token = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        values.push_back(parse_number(token, line_no));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return values;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    return in;
}

} // namespace

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

Matrix parse_matrix_market(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "empty Matrix Market input");
    ++line_no;
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw Error(ErrorKind::Parse, "line 1: expected '%%MatrixMarket matrix ...' header");
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (format != "coordinate" && format != "array")
        throw Error(ErrorKind::Parse, "line 1: unsupported Matrix Market format '" + format + "'");
    if (field != "real" && field != "integer" && field != "double" && field != "pattern")
        throw Error(ErrorKind::Parse, "line 1: unsupported Matrix Market field '" + field + "'");
    if (symmetry.empty()) symmetry = "general";
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
        throw Error(ErrorKind::Parse, "line 1: unsupported Matrix Market symmetry '" + symmetry + "'");
    if (format == "array" && field == "pattern")
        throw Error(ErrorKind::Parse, "line 1: pattern field is only valid for coordinate format");

    auto next_data_line = [&](std::string& out) {
        while (std::getline(in, out)) {
            ++line_no;
            auto t = trim(out);
            if (t.empty() || t.front() == '%') continue;
            return true;
        }
        return false;
    };

    if (!next_data_line(line)) throw Error(ErrorKind::Parse, "missing Matrix Market size line");
    std::istringstream size_line(line);
    long rows = -1, cols = -1, nnz = -1;
    size_line >> rows >> cols;
    if (format == "coordinate") size_line >> nnz;
    if (!size_line || rows <= 0 || cols <= 0 || (format == "coordinate" && nnz < 0))
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": malformed size line");
    if (symmetry != "general" && rows != cols)
        throw Error(ErrorKind::Parse, "symmetric Matrix Market matrix must be square");

    Matrix m = Matrix::Zero(rows, cols);
    const double mirror = symmetry == "skew-symmetric" ? -1.0 : 1.0;
    if (format == "coordinate") {
        for (long k = 0; k < nnz; ++k) {
            if (!next_data_line(line))
                throw Error(ErrorKind::Parse, "Matrix Market input ended after " + std::to_string(k) + " of " +
                                                  std::to_string(nnz) + " entries");
            std::istringstream entry(line);
            long i = 0, j = 0;
            entry >> i >> j;
            double v = 1.0;
            if (field != "pattern") {
                std::string tok;
                entry >> tok;
                v = parse_number(tok, line_no);
            }
            if (!entry || i < 1 || j < 1 || i > rows || j > cols)
                throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": malformed or out-of-range entry");
            m(i - 1, j - 1) = v;
            if (symmetry != "general" && i != j) m(j - 1, i - 1) = mirror * v;
        }
    } else {
        // Column-major; symmetric storage lists the lower triangle only.
        for (long j = 0; j < cols; ++j) {
            const long first = symmetry == "general" ? 0 : (symmetry == "symmetric" ? j : j + 1);
            for (long i = first; i < rows; ++i) {
                if (!next_data_line(line))
                    throw Error(ErrorKind::Parse, "Matrix Market array input ended early");
                const double v = parse_number(line, line_no);
                m(i, j) = v;
                if (symmetry != "general" && i != j) m(j, i) = mirror * v;
            }
        }
    }
    return m;
}

Matrix parse_csv_matrix(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        rows.push_back(split_csv_line(t, line_no));
        if (rows.back().size() != rows.front().size())
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(rows.front().size()) + " columns, got " +
                                              std::to_string(rows.back().size()));
    }
    if (rows.empty()) throw Error(ErrorKind::Parse, "CSV input contains no data rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

Matrix read_matrix(const std::filesystem::path& path) {
    auto in = open_input(path);
    const int first = in.peek();
    try {
        if (first == '%') return parse_matrix_market(in);
        return parse_csv_matrix(in);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

Vector parse_vector(std::string_view text) {
    std::istringstream in{std::string(text)};
    Matrix m = trim(text).starts_with("%%MatrixMarket") ? parse_matrix_market(in) : parse_csv_matrix(in);
    if (m.rows() != 1 && m.cols() != 1)
        throw Error(ErrorKind::Parse, "expected a vector (one row or one column), got " + std::to_string(m.rows()) +
                                          "x" + std::to_string(m.cols()));
    return m.rows() == 1 ? Vector(m.row(0).transpose()) : Vector(m.col(0));
}

Vector read_vector(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_vector(buffer.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_matrix_market(std::ostream& out, const Matrix& m) {
    out << "%%MatrixMarket matrix array real general\n" << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) out << format_double(m(i, j)) << '\n';
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    if (path.extension() == ".mtx")
        write_matrix_market(out, m);
    else
        write_matrix_csv(out, m);
    if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

} // namespace netcontract::io
