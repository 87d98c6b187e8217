#include "reviewlens/adapter.hpp"

#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <thread>

#include "reviewlens/error.hpp"
#include "reviewlens/text.hpp"

namespace reviewlens {

void to_json(Json& j, const RawBundle& b) {
    Json topics = Json::array();
    for (const auto& t : b.topics) {
        topics.push_back(Json{{"topic", t.name}, {"polarity", to_string(t.polarity)}, {"verbatims", t.verbatims}});
    }
    j = Json{{"review", b.review}, {"topics", std::move(topics)}, {"warnings", b.warnings}};
}

void from_json(const Json& j, RawBundle& b) {
    b.review = j.at("review").get<Review>();
    b.topics.clear();
    for (const auto& t : j.at("topics")) {
        b.topics.push_back(RawTopic{t.at("topic").get<std::string>(),
                                    parse_polarity(t.at("polarity").get<std::string>()),
                                    t.at("verbatims").get<std::vector<std::string>>()});
    }
    b.warnings = j.value("warnings", std::vector<std::string>{});
}

namespace {

bool has_alnum(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](char c) {
        return text::is_alpha(c) || (c >= '0' && c <= '9') || static_cast<unsigned char>(c) >= 0x80;
    });
}

std::string strip_chars(std::string_view s, std::string_view chars) {
    std::string out;
    for (char c : s) {
        if (chars.find(c) == std::string_view::npos) out.push_back(c);
    }
    return out;
}

}  // namespace

std::optional<ParsedList> parse_topic_list(std::string_view output) {
    const auto t = text::trim(output);
    if (t.size() >= 2 && t.front() == '[' && t.back() == ']') {
        ParsedList out;
        const auto inner = text::trim(t.substr(1, t.size() - 2));
        if (inner.empty()) return out;
        for (const auto& item : text::split(inner, ", ")) {
            const auto name = text::trim(item);
            if (!name.empty()) out.items.emplace_back(name);
        }
        return out;
    }
    if (!has_alnum(t)) return std::nullopt;
    ParsedList out;
    out.lenient = true;
    for (const auto& item : text::split(strip_chars(t, "[]\"'"), ",")) {
        const auto name = text::trim(item);
        if (!name.empty()) out.items.emplace_back(name);
    }
    return out;
}

std::optional<Polarity> parse_polarity_answer(std::string_view output, bool* lenient) {
    if (lenient) *lenient = false;
    if (output == "positive") return Polarity::Positive;
    if (output == "negative") return Polarity::Negative;
    const auto cleaned = text::lower(text::trim(strip_chars(output, "[]\"'.")));
    if (lenient) *lenient = true;
    if (cleaned == "positive") return Polarity::Positive;
    if (cleaned == "negative") return Polarity::Negative;
    return std::nullopt;
}

std::optional<std::vector<std::string>> parse_verbatims(std::string_view output) {
    std::vector<std::string> out;
    for (const auto& item : text::split(text::trim(output), kVerbatimSeparator)) {
        const auto v = text::trim(item);
        if (!v.empty()) out.emplace_back(v);
    }
    if (out.empty()) return std::nullopt;
    return out;
}

RawBundle run_inference(const Review& review, GenerativeModel& model, const PromptTemplates& tpl) {
    RawBundle bundle{review, {}, {}};
    auto warn = [&](std::string msg) { bundle.warnings.push_back("review " + review.id + ": " + std::move(msg)); };

    const auto topics = parse_topic_list(model.generate(tpl.topic_prompt(review.text)));
    if (!topics) {
        warn("unparseable topic list; bundle left empty");
        return bundle;
    }
    if (topics->lenient) warn("topic list parsed leniently");

    std::vector<std::pair<std::string, Polarity>> pairs;
    for (const auto& name : topics->items) {
        bool lenient = false;
        const auto answer = model.generate(tpl.polarity_prompt(review.text, name));
        const auto polarity = parse_polarity_answer(answer, &lenient);
        if (!polarity) {
            warn("dropped topic '" + name + "': unparseable polarity '" + answer + "'");
            continue;
        }
        if (lenient) warn("polarity for '" + name + "' parsed leniently");
        pairs.emplace_back(name, *polarity);
    }

    for (const auto& [name, polarity] : pairs) {
        const auto verbatims = parse_verbatims(model.generate(tpl.verbatim_prompt(review.text, name, polarity)));
        if (!verbatims) {
            warn("dropped topic '" + name + "': no verbatims");
            continue;
        }
        bundle.topics.push_back(RawTopic{name, polarity, *verbatims});
    }
    return bundle;
}

std::vector<RawBundle> run_inference_batch(std::span<const Review> reviews, const ModelFactory& factory,
                                           const PromptTemplates& tpl, std::size_t jobs) {
    tpl.validate();
    const std::size_t n = reviews.size();
    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
    std::vector<RawBundle> out(n);
    std::vector<std::exception_ptr> errors(workers);

    auto run_chunk = [&](std::size_t w) {
        try {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            if (begin == end) return;
            auto model = factory();
            for (std::size_t i = begin; i < end; ++i) out[i] = run_inference(reviews[i], *model, tpl);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    if (workers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

RuleBasedAdapter::RuleBasedAdapter(const SegmentNet& net, PromptTemplates tpl)
    : net_(&net),
      tpl_(std::move(tpl)),
      topic_(tpl_.topic_q, {"review"}, "templates.topic_q"),
      polarity_(tpl_.polarity_q, {"review", "topic"}, "templates.polarity_q"),
      verbatim_(tpl_.verbatim_q, {"review", "topic", "polarity"}, "templates.verbatim_q") {}

const LabelledRecord& RuleBasedAdapter::labelled(const std::string& review_text) {
    if (!last_ || last_->review.text != review_text) last_ = net_->label(Review{"", review_text, std::nullopt});
    return *last_;
}

std::string RuleBasedAdapter::generate(std::string_view prompt) {
    // Most specific template first: a verbatim prompt never parses as a topic one.
    if (auto slots = verbatim_.match(prompt)) {
        const auto& rec = labelled(slots->at("review"));
        const auto& name = slots->at("topic");
        const auto polarity = parse_polarity_answer(slots->at("polarity"));
        for (const auto& ins : rec.insights) {
            if (ins.topic == name && polarity && ins.polarity == *polarity) return format_verbatims(ins.verbatims);
        }
        return "";
    }
    if (auto slots = polarity_.match(prompt)) {
        const auto& rec = labelled(slots->at("review"));
        const auto& name = slots->at("topic");
        for (const auto& ins : rec.insights) {
            if (ins.topic == name) return std::string(to_string(ins.polarity));
        }
        return "unknown";
    }
    if (auto slots = topic_.match(prompt)) {
        const auto& rec = labelled(slots->at("review"));
        std::vector<std::string> names;
        for (const auto& ins : rec.insights) names.push_back(ins.topic);
        return format_topic_list(names);
    }
    throw DataError("prompt matches no known template: '" + std::string(prompt.substr(0, 80)) + "'");
}

ExecModel::ExecModel(const std::string& command) : command_(command) {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
        throw DataError("socketpair failed: " + std::string(std::strerror(errno)));
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(sv[0]);
        ::close(sv[1]);
        throw DataError("fork failed: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        ::dup2(sv[1], STDIN_FILENO);
        ::dup2(sv[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(sv[1]);
    fd_ = sv[0];
    pid_ = pid;
}

ExecModel::~ExecModel() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
    }
    if (pid_ > 0) {
        int status = 0;
        ::waitpid(pid_, &status, 0);
    }
}

std::string ExecModel::read_line() {
    while (true) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        char chunk[4096];
        const ssize_t got = ::recv(fd_, chunk, sizeof chunk, 0);
        if (got < 0 && errno == EINTR) continue;
        if (got <= 0) throw DataError("model process '" + command_ + "' closed its output");
        buffer_.append(chunk, static_cast<std::size_t>(got));
    }
}

std::string ExecModel::generate(std::string_view prompt) {
    const std::string request = Json{{"prompt", prompt}}.dump() + "\n";
    std::size_t sent = 0;
    while (sent < request.size()) {
        const ssize_t n = ::send(fd_, request.data() + sent, request.size() - sent, MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw DataError("model process '" + command_ + "' is not accepting input");
        sent += static_cast<std::size_t>(n);
    }
    const std::string line = read_line();
    try {
        const Json reply = Json::parse(line);
        if (!reply.is_object() || !reply.contains("text") || !reply.at("text").is_string()) {
            throw DataError("model reply lacks a string 'text' field");
        }
        return reply.at("text").get<std::string>();
    } catch (const Json::exception& e) {
        throw DataError("malformed model reply: " + std::string(e.what()));
    }
}

}  // namespace reviewlens
