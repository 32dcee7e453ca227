#include "aquaflow/io_codecs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <png.h>

#include <nlohmann/json.hpp>

namespace aquaflow {
namespace {

namespace fs = std::filesystem;

std::string lower_ext(const fs::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e;
}

// ---------------------------------------------------------------- pnm

// Reads one PNM header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(in.get()));
            return tok;
        }
    }
    return tok;
}

long pnm_int(std::istream& in, const fs::path& path, const char* what) {
    const std::string tok = pnm_token(in);
    long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v <= 0)
        throw CorruptFrame(path.string() + ": bad " + what + " in PNM header: '" + tok + "'");
    return v;
}

std::variant<RgbFrame, ScalarField> read_pnm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[2] = {};
    in.read(magic, 2);
    const bool color = magic[0] == 'P' && magic[1] == '6';
    const bool gray = magic[0] == 'P' && magic[1] == '5';
    if (!color && !gray)
        throw UnsupportedFormat(path.string() + ": not a binary PPM (P6) or PGM (P5)");
    const long w = pnm_int(in, path, "width");
    const long h = pnm_int(in, path, "height");
    const long maxval = pnm_int(in, path, "maxval");
    if (maxval != 255)
        throw UnsupportedFormat(path.string() + ": maxval " + std::to_string(maxval) +
                                " unsupported (need 255)");
    in.get(); // the single whitespace byte before the raster
    const std::size_t count = static_cast<std::size_t>(w) * h * (color ? 3 : 1);
    std::vector<std::uint8_t> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
        throw CorruptFrame(path.string() + ": truncated raster (" + std::to_string(in.gcount()) +
                           " of " + std::to_string(count) + " bytes)");
    if (color) {
        RgbFrame f(static_cast<int>(w), static_cast<int>(h));
        f.data = std::move(raw);
        return f;
    }
    ScalarField f(static_cast<int>(w), static_cast<int>(h), FieldKind::luma);
    for (std::size_t i = 0; i < count; ++i) f.data[i] = raw[i];
    return f;
}

// ---------------------------------------------------------------- png

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* file = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (file) std::fclose(file);
    }
};

std::variant<RgbFrame, ScalarField> read_png(const fs::path& path) {
    PngReadCloser ctx;
    ctx.file = std::fopen(path.string().c_str(), "rb");
    if (!ctx.file) throw IoError("cannot open " + path.string());
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("png_create_read_struct failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw CorruptFrame(path.string() + ": PNG decode failed");

    png_init_io(ctx.png, ctx.file);
    png_read_info(ctx.png, ctx.info);

    const png_uint_32 w = png_get_image_width(ctx.png, ctx.info);
    const png_uint_32 h = png_get_image_height(ctx.png, ctx.info);
    const int depth = png_get_bit_depth(ctx.png, ctx.info);
    const int ctype = png_get_color_type(ctx.png, ctx.info);
    if (depth == 16)
        throw UnsupportedFormat(path.string() + ": 16-bit PNG unsupported (need 8-bit)");

    if (ctype == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (ctype == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(ctx.png);
    png_set_strip_alpha(ctx.png);
    png_set_interlace_handling(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    const int channels = png_get_channels(ctx.png, ctx.info);
    const std::size_t stride = png_get_rowbytes(ctx.png, ctx.info);
    std::vector<std::uint8_t> raw(stride * h);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * stride;
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);

    if (channels == 3) {
        RgbFrame f(static_cast<int>(w), static_cast<int>(h));
        for (png_uint_32 y = 0; y < h; ++y)
            std::memcpy(&f.data[3 * static_cast<std::size_t>(y) * w], rows[y],
                        3 * static_cast<std::size_t>(w));
        return f;
    }
    if (channels == 1) {
        ScalarField f(static_cast<int>(w), static_cast<int>(h), FieldKind::luma);
        for (png_uint_32 y = 0; y < h; ++y)
            for (png_uint_32 x = 0; x < w; ++x) f.at(static_cast<int>(x), static_cast<int>(y)) = rows[y][x];
        return f;
    }
    throw UnsupportedFormat(path.string() + ": unexpected PNG channel count " +
                            std::to_string(channels));
}

// ---------------------------------------------------------------- y4m

class Y4mReader final : public FrameReader {
public:
    explicit Y4mReader(const FrameSource& src) {
        if (src.path == "-") {
            file_ = stdin;
            owns_ = false;
        } else {
            file_ = std::fopen(src.path.string().c_str(), "rb");
            if (!file_) throw IoError("cannot open " + src.path.string());
            owns_ = true;
        }
        parse_header(src);
        if (src.fps > 0) fps_ = src.fps; // explicit fps overrides the header
        if (src.frame_index_range) {
            trim_lo_ = std::max<std::int64_t>(0, src.frame_index_range->first);
            trim_hi_ = std::max(trim_lo_, src.frame_index_range->second);
        }
        seek(0);
    }

    ~Y4mReader() override {
        if (owns_ && file_) std::fclose(file_);
    }

    std::optional<DecodedFrame> next() override {
        if (pos_ >= trim_hi_) return std::nullopt;
        if (!read_frame_header()) return std::nullopt;
        YuvFrame f = read_planes();
        DecodedFrame out{pos_ - trim_lo_, std::move(f)};
        ++pos_;
        return out;
    }

    // indices are logical: 0 maps to the start of the trim range
    void seek(std::int64_t index) override {
        std::int64_t target = trim_lo_ + std::max<std::int64_t>(index, 0);
        target = std::min(target, trim_hi_);
        if (target < pos_) {
            if (!owns_) throw IoError("y4m on stdin cannot seek backwards");
            std::fseek(file_, data_start_, SEEK_SET);
            pos_ = 0;
        }
        while (pos_ < target) {
            if (!read_frame_header()) return; // past end; next() reports eof
            skip_planes();
            ++pos_;
        }
    }

    bool seekable() const override { return owns_; }
    std::int64_t frame_count() const override { return -1; }
    std::int64_t position() const override { return std::max<std::int64_t>(0, pos_ - trim_lo_); }
    double fps() const override { return fps_; }

private:
    std::FILE* file_ = nullptr;
    bool owns_ = false;
    int width_ = 0, height_ = 0;
    enum class Chroma { c420, c444, mono } chroma_ = Chroma::c420;
    double fps_ = 0.0;
    long data_start_ = 0;
    std::int64_t pos_ = 0;
    std::int64_t trim_lo_ = 0;
    std::int64_t trim_hi_ = std::numeric_limits<std::int64_t>::max();

    std::string read_line() {
        std::string line;
        int c;
        while ((c = std::fgetc(file_)) != EOF && c != '\n') {
            line.push_back(static_cast<char>(c));
            if (line.size() > 1024) throw CorruptFrame("y4m: unterminated header line");
        }
        return line;
    }

    void parse_header(const FrameSource& src) {
        const std::string line = read_line();
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok != "YUV4MPEG2")
            throw UnsupportedFormat(src.path.string() + ": missing YUV4MPEG2 signature");
        std::string colorspace = "C420";
        while (ss >> tok) {
            if (tok.empty()) continue;
            switch (tok[0]) {
            case 'W': width_ = std::stoi(tok.substr(1)); break;
            case 'H': height_ = std::stoi(tok.substr(1)); break;
            case 'F': {
                const auto colon = tok.find(':');
                if (colon == std::string::npos)
                    throw CorruptFrame("y4m: malformed frame rate '" + tok + "'");
                const double num = std::stod(tok.substr(1, colon - 1));
                const double den = std::stod(tok.substr(colon + 1));
                if (den > 0) fps_ = num / den;
                break;
            }
            case 'C': colorspace = tok; break;
            default: break; // interlace/aspect/extensions ignored
            }
        }
        if (width_ <= 0 || height_ <= 0)
            throw CorruptFrame(src.path.string() + ": y4m header missing W/H");
        if (colorspace.rfind("C420", 0) == 0) {
            if (width_ % 2 || height_ % 2)
                throw UnsupportedFormat("y4m: 4:2:0 requires even dimensions");
            chroma_ = Chroma::c420;
        } else if (colorspace == "C444") {
            chroma_ = Chroma::c444;
        } else if (colorspace == "Cmono") {
            chroma_ = Chroma::mono;
        } else {
            throw UnsupportedFormat("y4m: colorspace '" + colorspace +
                                    "' unsupported (need C420*, C444 or Cmono)");
        }
        data_start_ = std::ftell(file_);
    }

    std::size_t frame_bytes() const {
        const std::size_t y = static_cast<std::size_t>(width_) * height_;
        switch (chroma_) {
        case Chroma::c420: return y + y / 2;
        case Chroma::c444: return 3 * y;
        case Chroma::mono: return y;
        }
        return y;
    }

    bool read_frame_header() {
        const int c = std::fgetc(file_);
        if (c == EOF) return false;
        std::ungetc(c, file_);
        const std::string line = read_line();
        if (line.rfind("FRAME", 0) != 0)
            throw CorruptFrame("y4m: frame " + std::to_string(pos_) +
                               ": expected FRAME marker, got '" + line.substr(0, 16) + "'");
        return true;
    }

    void skip_planes() {
        if (owns_) {
            std::fseek(file_, static_cast<long>(frame_bytes()), SEEK_CUR);
        } else {
            std::vector<std::uint8_t> sink(frame_bytes());
            read_exact(sink.data(), sink.size());
        }
    }

    void read_exact(std::uint8_t* dst, std::size_t count) {
        if (std::fread(dst, 1, count, file_) != count)
            throw CorruptFrame("y4m: frame " + std::to_string(pos_) + ": truncated plane data");
    }

    YuvFrame read_planes() {
        const std::size_t ny = static_cast<std::size_t>(width_) * height_;
        std::vector<std::uint8_t> raw(frame_bytes());
        read_exact(raw.data(), raw.size());
        YuvFrame f(width_, height_);
        for (std::size_t i = 0; i < ny; ++i) f.y[i] = raw[i];
        switch (chroma_) {
        case Chroma::mono:
            for (std::size_t i = 0; i < ny; ++i) {
                f.u[i] = 128.0;
                f.v[i] = 128.0;
            }
            break;
        case Chroma::c444:
            for (std::size_t i = 0; i < ny; ++i) f.u[i] = raw[ny + i];
            for (std::size_t i = 0; i < ny; ++i) f.v[i] = raw[2 * ny + i];
            break;
        case Chroma::c420: {
            const int cw = width_ / 2, ch = height_ / 2;
            const std::uint8_t* up = raw.data() + ny;
            const std::uint8_t* vp = up + static_cast<std::size_t>(cw) * ch;
            // nearest-neighbor chroma upsampling: each sample covers 2x2 luma
            for (int y = 0; y < height_; ++y) {
                const std::size_t crow = static_cast<std::size_t>(y / 2) * cw;
                for (int x = 0; x < width_; ++x) {
                    const std::size_t ci = crow + x / 2;
                    const std::size_t i = static_cast<std::size_t>(y) * width_ + x;
                    f.u[i] = up[ci];
                    f.v[i] = vp[ci];
                }
            }
            break;
        }
        }
        return f;
    }
};

// ---------------------------------------------------------------- sequences

class SequenceReader final : public FrameReader {
public:
    explicit SequenceReader(const FrameSource& src) : fps_(src.fps) {
        if (!fs::is_directory(src.path))
            throw IoError(src.path.string() + " is not a directory");
        for (const auto& entry : fs::directory_iterator(src.path)) {
            if (!entry.is_regular_file()) continue;
            const std::string ext = lower_ext(entry.path());
            if (ext == ".ppm" || ext == ".pgm" || ext == ".png") files_.push_back(entry.path());
        }
        std::sort(files_.begin(), files_.end());
        if (src.frame_index_range) {
            const auto [lo, hi] = *src.frame_index_range;
            const auto n = static_cast<std::int64_t>(files_.size());
            const auto a = std::clamp<std::int64_t>(lo, 0, n);
            const auto b = std::clamp<std::int64_t>(hi, a, n);
            files_ = std::vector<fs::path>(files_.begin() + a, files_.begin() + b);
        }
        if (files_.empty())
            throw EmptySource(src.path.string() + ": no .ppm/.pgm/.png frames found");
    }

    std::optional<DecodedFrame> next() override {
        if (pos_ >= static_cast<std::int64_t>(files_.size())) return std::nullopt;
        auto img = read_image(files_[pos_]);
        int w = 0, h = 0;
        bool color = false;
        if (std::holds_alternative<RgbFrame>(img)) {
            w = std::get<RgbFrame>(img).width;
            h = std::get<RgbFrame>(img).height;
            color = true;
        } else {
            w = std::get<ScalarField>(img).width;
            h = std::get<ScalarField>(img).height;
        }
        if (pos_ == 0 || width_ == 0) {
            width_ = w;
            height_ = h;
            color_ = color;
        } else {
            if (w != width_ || h != height_)
                throw DimensionChange("frame " + std::to_string(pos_) + " (" +
                                      files_[pos_].filename().string() + ") is " +
                                      std::to_string(w) + "x" + std::to_string(h) +
                                      ", sequence started at " + std::to_string(width_) + "x" +
                                      std::to_string(height_));
            if (color != color_)
                throw UnsupportedFormat("frame " + std::to_string(pos_) + " (" +
                                        files_[pos_].filename().string() +
                                        ") mixes color and grayscale within one sequence");
        }
        DecodedFrame out;
        out.index = pos_;
        if (color)
            out.image = std::move(std::get<RgbFrame>(img));
        else
            out.image = std::move(std::get<ScalarField>(img));
        ++pos_;
        return out;
    }

    void seek(std::int64_t index) override { pos_ = std::clamp<std::int64_t>(index, 0, static_cast<std::int64_t>(files_.size())); }
    bool seekable() const override { return true; }
    std::int64_t frame_count() const override { return static_cast<std::int64_t>(files_.size()); }
    std::int64_t position() const override { return pos_; }
    double fps() const override { return fps_; }

private:
    std::vector<fs::path> files_;
    std::int64_t pos_ = 0;
    int width_ = 0, height_ = 0;
    bool color_ = false;
    double fps_ = 0.0;
};

} // namespace

std::unique_ptr<FrameReader> FrameReader::open(const FrameSource& source) {
    switch (source.kind) {
    case FrameSource::Kind::yuv4mpeg: return std::make_unique<Y4mReader>(source);
    case FrameSource::Kind::image_sequence: return std::make_unique<SequenceReader>(source);
    }
    throw Error("FrameReader::open: unknown source kind");
}

std::variant<RgbFrame, ScalarField> read_image(const std::filesystem::path& path) {
    if (!fs::exists(path)) throw IoError(path.string() + " does not exist");
    const std::string ext = lower_ext(path);
    if (ext == ".ppm" || ext == ".pgm") return read_pnm(path);
    if (ext == ".png") return read_png(path);
    throw UnsupportedFormat(path.string() + ": unsupported image extension '" + ext + "'");
}

void write_ppm(const RgbFrame& frame, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P6\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.data.data()),
              static_cast<std::streamsize>(frame.data.size()));
    if (!out) throw IoError("short write to " + path.string());
}

void write_pgm(const ScalarField& field, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << field.width << " " << field.height << "\n255\n";
    std::vector<std::uint8_t> bytes(field.data.size());
    for (std::size_t i = 0; i < field.data.size(); ++i) {
        const long q = std::lround(field.data[i]);
        bytes[i] = static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
}

namespace {

// shortest representation that round-trips exactly
std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            if (c) out << ',';
            out << format_double(m.at(r, c));
        }
        out << '\n';
    }
    if (!out) throw IoError("short write to " + path.string());
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p < end) {
            double v = 0.0;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc())
                throw IoError(path.string() + ": bad number in CSV row " +
                              std::to_string(rows.size()));
            row.push_back(v);
            p = res.ptr;
            if (p < end && *p == ',') ++p;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError(path.string() + ": ragged CSV row " + std::to_string(rows.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return {};
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) m.at(r, c) = rows[r][c];
    return m;
}

void write_heatmap_pgm(const Matrix& m, const std::filesystem::path& path) {
    double maxv = 0.0;
    for (double v : m.v) maxv = std::max(maxv, v);
    ScalarField img(m.cols, m.rows, FieldKind::magnitude);
    if (maxv > 0)
        for (std::size_t i = 0; i < m.v.size(); ++i) img.data[i] = m.v[i] / maxv * 255.0;
    write_pgm(img, path);
}

void write_report_json(const SessionReport& report, const std::filesystem::path& path) {
    nlohmann::json j;
    j["schema_version"] = report.schema_version;
    j["config"] = report.config_echo;
    j["tol_used"] = report.tol_used;
    auto matrix_json = [](const Matrix& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (int r = 0; r < m.rows; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    j["windows"] = nlohmann::json::array();
    for (const WindowResult& w : report.windows) {
        nlohmann::json jw;
        jw["name"] = w.name;
        jw["start_frame"] = w.start_frame;
        jw["end_frame"] = w.end_frame;
        jw["frames_retained"] = w.frames_retained;
        jw["pairs_processed"] = w.pairs_processed;
        jw["gated_pixels"] = w.gated_pixels;
        jw["gated_mass"] = w.gated_mass;
        jw["dispersion_total"] = w.dispersion_total;
        jw["motion_count"] = w.motion_count;
        jw["dispersion_prob"] = matrix_json(w.dispersion_prob);
        jw["motion_prob"] = matrix_json(w.motion_prob);
        j["windows"].push_back(std::move(jw));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("short write to " + path.string());
}

} // namespace aquaflow
