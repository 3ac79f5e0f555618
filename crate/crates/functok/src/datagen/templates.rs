//! Template bank: query patterns with typed slots for every fixture
//! function, plus affix pools and an off-domain bank for negative queries.
//!
//! Each pattern contains `{i}` placeholders that are filled from the slot at
//! the same position. A slot fills both the query surface and the call
//! argument, so generated examples are query-consistent by construction:
//! every sampled argument value (bools aside) appears verbatim in the query.

/// How a slot samples its surface text and argument value.
#[derive(Debug, Clone, Copy)]
pub enum Domain {
    /// Free-string parameter; surface equals the argument value.
    Words(&'static [&'static str]),
    /// Enum parameter; surface equals the chosen enum value.
    Choice(&'static [&'static str]),
    /// Integer parameter in `[lo, hi]`; surface is the decimal rendering.
    Int { lo: i64, hi: i64 },
    /// Boolean parameter; each option pairs a surface word with the value.
    Bool(&'static [(&'static str, bool)]),
    /// List-of-string parameter; `n ∈ [min, max]` distinct items joined with
    /// " and " in the query.
    List {
        pool: &'static [&'static str],
        min: usize,
        max: usize,
    },
}

/// One typed slot: the parameter it binds and the value domain.
#[derive(Debug, Clone, Copy)]
pub struct Slot {
    pub param: &'static str,
    pub domain: Domain,
}

/// One query pattern with its slots, in `{0}`, `{1}`, ... order.
#[derive(Debug, Clone, Copy)]
pub struct Template {
    pub pattern: &'static str,
    pub slots: &'static [Slot],
}

/// Query prefixes applied uniformly to every pattern.
pub const PREFIXES: [&str; 8] = [
    "",
    "please ",
    "hey, ",
    "could you ",
    "i need you to ",
    "can you ",
    "i want to ",
    "quick - ",
];

/// Query suffixes applied uniformly to every pattern.
pub const SUFFIXES: [&str; 7] = [
    "",
    " now",
    " please",
    " for me",
    " right away",
    " when you can",
    " thanks",
];

const PHONES: &[&str] = &[
    "555-0123", "555-0148", "555-0162", "555-0199", "202-555-0117", "212-555-0154",
    "312-555-0175", "415-555-0186",
];
const MESSAGES: &[&str] = &[
    "i will be there in 10 minutes",
    "meeting moved to 3pm",
    "can you pick up groceries",
    "happy birthday!",
    "call me when you are free",
    "the package has arrived",
    "running late, sorry",
    "dinner is ready",
];
const TIMES: &[&str] = &[
    "06:30 AM", "07:00 AM", "07:45 AM", "08:15 AM", "12:00 PM", "05:30 PM", "09:00 PM",
    "10:30 PM",
];
const LABELS: &[&str] = &["Workout", "Meeting", "Medication", "Wake up", "Standup", "Laundry"];
const CITIES: &[&str] = &[
    "Boston", "Seattle", "Austin", "Denver", "Miami", "Chicago", "Portland", "Atlanta",
];
const CATEGORIES: &[&str] = &[
    "technology", "sports", "business", "health", "science", "entertainment",
];
const REGIONS: &[&str] = &["US", "GB", "DE", "FR", "JP", "IN"];
const LANGS: &[&str] = &["en", "de", "fr", "es", "ja"];
const EMAILS: &[&str] = &[
    "alice@example.com", "bob@example.com", "carol@example.com", "dave@example.com",
    "erin@example.com", "frank@example.com",
];
const SUBJECTS: &[&str] = &[
    "Quarterly report", "Lunch plans", "Project update", "Travel itinerary", "Budget review",
];
const BODIES: &[&str] = &[
    "please find the details attached",
    "see my notes below",
    "let me know your thoughts",
    "here is the summary we discussed",
];
const FILES: &[&str] = &["report.pdf", "photo.jpg", "notes.txt", "slides.pptx", "budget.xlsx"];
const SEARCHES: &[&str] = &[
    "rust programming tutorials",
    "best hiking trails",
    "sourdough bread recipe",
    "jazz piano covers",
    "home workout routines",
    "electric car reviews",
];
const MEDIA: &[&str] = &[
    "Bohemian Rhapsody",
    "my morning playlist",
    "the daily news podcast",
    "lo-fi study beats",
    "Thriller",
];
const DEVICES: &[&str] = &[
    "Kitchen speaker", "Bedroom display", "Office speaker", "Patio speaker",
];
const DESTS: &[&str] = &[
    "the airport",
    "downtown Boston",
    "Central Park",
    "the nearest gas station",
    "123 Main Street",
    "the office",
];
const SEATS: &[&str] = &["driver", "passenger"];
const SEAT_DIRS: &[&str] = &["forward", "backward", "up", "down"];
const WINDOWS: &[&str] = &["front left", "front right", "rear left", "rear right"];
const WINDOW_DIRS: &[&str] = &["up", "down"];
const ZONES: &[&str] = &["driver", "passenger", "rear"];
const SUNROOF_ACTIONS: &[&str] = &["open", "close", "tilt"];
const CAMERAS: &[&str] = &["front", "back"];
const RESOLUTIONS: &[&str] = &["720p", "1080p", "4K"];
const YT_FILTERS: &[&str] = &["Relevance", "Upload date", "View Count", "Rating"];
const NAV_MODES: &[&str] = &["driving", "walking", "transit", "cycling"];
const DOORS: &[&str] = &["front door", "back door", "garage door"];
const LOCK_ACTIONS: &[&str] = &["lock", "unlock"];
const ON_OFF: &[(&str, bool)] = &[("on", true), ("off", false)];

macro_rules! slot {
    ($param:expr, $domain:expr) => {
        Slot {
            param: $param,
            domain: $domain,
        }
    };
}

/// The per-function template bank; `None` for unknown functions.
pub fn templates_for(function: &str) -> Option<&'static [Template]> {
    use Domain::*;
    Some(match function {
        "take_a_photo" => &[
            Template { pattern: "take a photo with the {0} camera", slots: &[slot!("camera", Words(CAMERAS))] },
            Template { pattern: "snap a {1} picture using the {0} camera", slots: &[slot!("camera", Words(CAMERAS)), slot!("resolution", Choice(RESOLUTIONS))] },
            Template { pattern: "take a photo in {0} resolution", slots: &[slot!("resolution", Choice(RESOLUTIONS))] },
            Template { pattern: "use the {0} camera to capture a photo at {1}", slots: &[slot!("camera", Words(CAMERAS)), slot!("resolution", Choice(RESOLUTIONS))] },
            Template { pattern: "take a picture", slots: &[] },
            Template { pattern: "capture a {0} photo", slots: &[slot!("resolution", Choice(RESOLUTIONS))] },
        ],
        "make_phone_call" => &[
            Template { pattern: "call {0}", slots: &[slot!("phone_number", Words(PHONES))] },
            Template { pattern: "dial the number {0}", slots: &[slot!("phone_number", Words(PHONES))] },
            Template { pattern: "make a phone call to {0}", slots: &[slot!("phone_number", Words(PHONES))] },
            Template { pattern: "ring {0} on the phone", slots: &[slot!("phone_number", Words(PHONES))] },
            Template { pattern: "start a call with {0}", slots: &[slot!("phone_number", Words(PHONES))] },
        ],
        "send_text_message" => &[
            Template { pattern: "text {0} saying {1}", slots: &[slot!("phone_number", Words(PHONES)), slot!("message", Words(MESSAGES))] },
            Template { pattern: "send a text to {0} that says {1}", slots: &[slot!("phone_number", Words(PHONES)), slot!("message", Words(MESSAGES))] },
            Template { pattern: "message {0} with {1}", slots: &[slot!("phone_number", Words(PHONES)), slot!("message", Words(MESSAGES))] },
            Template { pattern: "send {1} as an sms to {0}", slots: &[slot!("phone_number", Words(PHONES)), slot!("message", Words(MESSAGES))] },
            Template { pattern: "shoot a message over to {0}: {1}", slots: &[slot!("phone_number", Words(PHONES)), slot!("message", Words(MESSAGES))] },
        ],
        "set_alarm" => &[
            Template { pattern: "set an alarm for {0}", slots: &[slot!("time", Words(TIMES))] },
            Template { pattern: "wake me up at {0}", slots: &[slot!("time", Words(TIMES))] },
            Template { pattern: "set a {1} alarm at {0}", slots: &[slot!("time", Words(TIMES)), slot!("label", Words(LABELS))] },
            Template { pattern: "create an alarm at {0} labeled {1}", slots: &[slot!("time", Words(TIMES)), slot!("label", Words(LABELS))] },
            Template { pattern: "add an alarm for {0} called {1}", slots: &[slot!("time", Words(TIMES)), slot!("label", Words(LABELS))] },
        ],
        "set_screen_brightness" => &[
            Template { pattern: "set the screen brightness to {0} percent", slots: &[slot!("level", Int { lo: 0, hi: 100 })] },
            Template { pattern: "change brightness to {0}", slots: &[slot!("level", Int { lo: 0, hi: 100 })] },
            Template { pattern: "make the display brightness {0} percent", slots: &[slot!("level", Int { lo: 0, hi: 100 })] },
            Template { pattern: "adjust the screen to {0} brightness", slots: &[slot!("level", Int { lo: 0, hi: 100 })] },
            Template { pattern: "dim the screen to {0} percent", slots: &[slot!("level", Int { lo: 0, hi: 40 })] },
        ],
        "toggle_bluetooth" => &[
            Template { pattern: "turn bluetooth {0}", slots: &[slot!("enabled", Bool(ON_OFF))] },
            Template { pattern: "switch the bluetooth radio {0}", slots: &[slot!("enabled", Bool(ON_OFF))] },
            Template { pattern: "toggle bluetooth {0}", slots: &[slot!("enabled", Bool(ON_OFF))] },
            Template { pattern: "bluetooth {0}", slots: &[slot!("enabled", Bool(ON_OFF))] },
            Template { pattern: "i need bluetooth turned {0}", slots: &[slot!("enabled", Bool(ON_OFF))] },
        ],
        "get_trending_news" => &[
            Template { pattern: "show me trending {0} news", slots: &[slot!("category", Words(CATEGORIES))] },
            Template { pattern: "get the top {1} trending {0} stories", slots: &[slot!("category", Words(CATEGORIES)), slot!("max_results", Int { lo: 1, hi: 20 })] },
            Template { pattern: "what {0} news is trending in {1}", slots: &[slot!("category", Words(CATEGORIES)), slot!("region", Words(REGIONS))] },
            Template { pattern: "fetch trending news", slots: &[] },
            Template { pattern: "trending {0} headlines in {1} in {2}", slots: &[slot!("category", Words(CATEGORIES)), slot!("region", Words(REGIONS)), slot!("language", Words(LANGS))] },
            Template { pattern: "give me {0} trending articles", slots: &[slot!("max_results", Int { lo: 1, hi: 20 })] },
        ],
        "get_weather_forecast" => &[
            Template { pattern: "what is the weather in {0}", slots: &[slot!("location", Words(CITIES))] },
            Template { pattern: "get the weather forecast for {0}", slots: &[slot!("location", Words(CITIES))] },
            Template { pattern: "show the {1} day forecast for {0}", slots: &[slot!("location", Words(CITIES)), slot!("days", Int { lo: 2, hi: 10 })] },
            Template { pattern: "weather in {0} for the next {1} days", slots: &[slot!("location", Words(CITIES)), slot!("days", Int { lo: 2, hi: 10 })] },
            Template { pattern: "will it rain in {0}", slots: &[slot!("location", Words(CITIES))] },
        ],
        "send_email" => &[
            Template { pattern: "email {0} about {1} saying {2}", slots: &[slot!("recipient", Words(EMAILS)), slot!("subject", Words(SUBJECTS)), slot!("body", Words(BODIES))] },
            Template { pattern: "send an email to {0} with subject {1} and body {2}", slots: &[slot!("recipient", Words(EMAILS)), slot!("subject", Words(SUBJECTS)), slot!("body", Words(BODIES))] },
            Template { pattern: "email {0} the subject {1}, body {2}, attaching {3}", slots: &[slot!("recipient", Words(EMAILS)), slot!("subject", Words(SUBJECTS)), slot!("body", Words(BODIES)), slot!("attachments", List { pool: FILES, min: 1, max: 2 })] },
            Template { pattern: "send {0} an email about {1} saying {2} and cc {3}", slots: &[slot!("recipient", Words(EMAILS)), slot!("subject", Words(SUBJECTS)), slot!("body", Words(BODIES)), slot!("cc", List { pool: EMAILS, min: 1, max: 2 })] },
            Template { pattern: "write to {0} regarding {1} with the message {2}", slots: &[slot!("recipient", Words(EMAILS)), slot!("subject", Words(SUBJECTS)), slot!("body", Words(BODIES))] },
        ],
        "search_youtube_videos" => &[
            Template { pattern: "search youtube for {0}", slots: &[slot!("query", Words(SEARCHES))] },
            Template { pattern: "find {1} youtube videos about {0}", slots: &[slot!("query", Words(SEARCHES)), slot!("max_results", Int { lo: 1, hi: 25 })] },
            Template { pattern: "look up {0} on youtube sorted by {1}", slots: &[slot!("query", Words(SEARCHES)), slot!("search_filter", Choice(YT_FILTERS))] },
            Template { pattern: "youtube search: {0}", slots: &[slot!("query", Words(SEARCHES))] },
            Template { pattern: "show youtube results for {0} ordered by {1}", slots: &[slot!("query", Words(SEARCHES)), slot!("search_filter", Choice(YT_FILTERS))] },
        ],
        "open_map_navigation" => &[
            Template { pattern: "navigate to {0}", slots: &[slot!("destination", Words(DESTS))] },
            Template { pattern: "start {1} directions to {0}", slots: &[slot!("destination", Words(DESTS)), slot!("mode", Choice(NAV_MODES))] },
            Template { pattern: "take me to {0}", slots: &[slot!("destination", Words(DESTS))] },
            Template { pattern: "open navigation to {0} in {1} mode", slots: &[slot!("destination", Words(DESTS)), slot!("mode", Choice(NAV_MODES))] },
            Template { pattern: "get me {1} directions to {0}", slots: &[slot!("destination", Words(DESTS)), slot!("mode", Choice(NAV_MODES))] },
        ],
        "search_web" => &[
            Template { pattern: "search the web for {0}", slots: &[slot!("query", Words(SEARCHES))] },
            Template { pattern: "google {0}", slots: &[slot!("query", Words(SEARCHES))] },
            Template { pattern: "look up {0} in the browser", slots: &[slot!("query", Words(SEARCHES))] },
            Template { pattern: "find the top {1} results for {0}", slots: &[slot!("query", Words(SEARCHES)), slot!("max_results", Int { lo: 1, hi: 15 })] },
            Template { pattern: "web search: {0}", slots: &[slot!("query", Words(SEARCHES))] },
        ],
        "set_thermostat_temperature" => &[
            Template { pattern: "set the thermostat to {0} degrees", slots: &[slot!("temperature", Int { lo: 50, hi: 90 })] },
            Template { pattern: "make it {0} degrees inside", slots: &[slot!("temperature", Int { lo: 50, hi: 90 })] },
            Template { pattern: "change the thermostat temperature to {0}", slots: &[slot!("temperature", Int { lo: 50, hi: 90 })] },
            Template { pattern: "set home temperature to {0} fahrenheit", slots: &[slot!("temperature", Int { lo: 50, hi: 90 })] },
            Template { pattern: "warm the house to {0} degrees", slots: &[slot!("temperature", Int { lo: 68, hi: 90 })] },
        ],
        "control_door_lock" => &[
            Template { pattern: "{1} the {0}", slots: &[slot!("door", Choice(DOORS)), slot!("action", Choice(LOCK_ACTIONS))] },
            Template { pattern: "please {1} the {0} for me", slots: &[slot!("door", Choice(DOORS)), slot!("action", Choice(LOCK_ACTIONS))] },
            Template { pattern: "can you {1} the {0} of the house", slots: &[slot!("door", Choice(DOORS)), slot!("action", Choice(LOCK_ACTIONS))] },
            Template { pattern: "i want the {0} set to {1}", slots: &[slot!("door", Choice(DOORS)), slot!("action", Choice(LOCK_ACTIONS))] },
            Template { pattern: "{1} my {0} remotely", slots: &[slot!("door", Choice(DOORS)), slot!("action", Choice(LOCK_ACTIONS))] },
        ],
        "play_media_on_device" => &[
            Template { pattern: "play {0}", slots: &[slot!("media_name", Words(MEDIA))] },
            Template { pattern: "play {0} on the {1}", slots: &[slot!("media_name", Words(MEDIA)), slot!("device_name", Words(DEVICES))] },
            Template { pattern: "put {0} on the {1}", slots: &[slot!("media_name", Words(MEDIA)), slot!("device_name", Words(DEVICES))] },
            Template { pattern: "start playing {0}", slots: &[slot!("media_name", Words(MEDIA))] },
            Template { pattern: "cast {0} to the {1}", slots: &[slot!("media_name", Words(MEDIA)), slot!("device_name", Words(DEVICES))] },
        ],
        "adjust_volume" => &[
            Template { pattern: "turn the volume up by {0}", slots: &[slot!("volume_diff", Int { lo: 1, hi: 15 })] },
            Template { pattern: "increase the volume by {0}", slots: &[slot!("volume_diff", Int { lo: 1, hi: 15 })] },
            Template { pattern: "raise the volume {0} notches", slots: &[slot!("volume_diff", Int { lo: 1, hi: 15 })] },
            Template { pattern: "set the volume to {0}", slots: &[slot!("set_value", Int { lo: 0, hi: 50 })] },
            Template { pattern: "put the volume at level {0}", slots: &[slot!("set_value", Int { lo: 0, hi: 50 })] },
        ],
        "set_climate_temperature" => &[
            Template { pattern: "set the {0} zone to {1} degrees", slots: &[slot!("zone", Words(ZONES)), slot!("temperature", Int { lo: 60, hi: 80 })] },
            Template { pattern: "make the {0} side {1} degrees", slots: &[slot!("zone", Words(ZONES)), slot!("temperature", Int { lo: 60, hi: 80 })] },
            Template { pattern: "climate control: {0} zone at {1}", slots: &[slot!("zone", Words(ZONES)), slot!("temperature", Int { lo: 60, hi: 80 })] },
            Template { pattern: "set cabin temperature for the {0} to {1}", slots: &[slot!("zone", Words(ZONES)), slot!("temperature", Int { lo: 60, hi: 80 })] },
            Template { pattern: "warm the {0} area of the car to {1} degrees", slots: &[slot!("zone", Words(ZONES)), slot!("temperature", Int { lo: 68, hi: 80 })] },
        ],
        "adjust_seat_position" => &[
            Template { pattern: "move the {0} seat {1} by {2} millimeters", slots: &[slot!("seat", Words(SEATS)), slot!("position", Words(SEAT_DIRS)), slot!("distance", Int { lo: 5, hi: 80 })] },
            Template { pattern: "adjust the {0} seat {1} {2} mm", slots: &[slot!("seat", Words(SEATS)), slot!("position", Words(SEAT_DIRS)), slot!("distance", Int { lo: 5, hi: 80 })] },
            Template { pattern: "slide the {0} seat {1} by {2}", slots: &[slot!("seat", Words(SEATS)), slot!("position", Words(SEAT_DIRS)), slot!("distance", Int { lo: 5, hi: 80 })] },
            Template { pattern: "shift my {0} seat {1} {2} millimeters", slots: &[slot!("seat", Words(SEATS)), slot!("position", Words(SEAT_DIRS)), slot!("distance", Int { lo: 5, hi: 80 })] },
            Template { pattern: "push the {0} seat {1} a distance of {2}", slots: &[slot!("seat", Words(SEATS)), slot!("position", Words(SEAT_DIRS)), slot!("distance", Int { lo: 5, hi: 80 })] },
        ],
        "control_window" => &[
            Template { pattern: "roll the {0} window {1} by {2} millimeters", slots: &[slot!("window", Words(WINDOWS)), slot!("position", Words(WINDOW_DIRS)), slot!("distance", Int { lo: 10, hi: 300 })] },
            Template { pattern: "move the {0} window {1} {2} mm", slots: &[slot!("window", Words(WINDOWS)), slot!("position", Words(WINDOW_DIRS)), slot!("distance", Int { lo: 10, hi: 300 })] },
            Template { pattern: "open the {0} window {1} by {2}", slots: &[slot!("window", Words(WINDOWS)), slot!("position", Words(WINDOW_DIRS)), slot!("distance", Int { lo: 10, hi: 300 })] },
            Template { pattern: "adjust the {0} window {1} a distance of {2}", slots: &[slot!("window", Words(WINDOWS)), slot!("position", Words(WINDOW_DIRS)), slot!("distance", Int { lo: 10, hi: 300 })] },
            Template { pattern: "slide the {0} window {1} {2} millimeters", slots: &[slot!("window", Words(WINDOWS)), slot!("position", Words(WINDOW_DIRS)), slot!("distance", Int { lo: 10, hi: 300 })] },
        ],
        "operate_sunroof" => &[
            Template { pattern: "{0} the sunroof", slots: &[slot!("action", Words(SUNROOF_ACTIONS))] },
            Template { pattern: "{0} the sunroof to {1} percent", slots: &[slot!("action", Words(SUNROOF_ACTIONS)), slot!("intensity", Int { lo: 5, hi: 100 })] },
            Template { pattern: "sunroof: {0} it to {1}", slots: &[slot!("action", Words(SUNROOF_ACTIONS)), slot!("intensity", Int { lo: 5, hi: 100 })] },
            Template { pattern: "please {0} the car sunroof", slots: &[slot!("action", Words(SUNROOF_ACTIONS))] },
            Template { pattern: "{0} the sunroof about {1} percent of the way", slots: &[slot!("action", Words(SUNROOF_ACTIONS)), slot!("intensity", Int { lo: 5, hi: 100 })] },
        ],
        _ => return None,
    })
}

/// Off-domain query patterns for negative examples: math trivia, cooking,
/// general knowledge, small talk. Integer slots widen the query space; the
/// irrelevant call takes no arguments, so the slots only affect the surface.
pub const NEGATIVE_TEMPLATES: &[Template] = &[
    Template { pattern: "what is {0} times {1}", slots: &[slot!("_", Domain::Int { lo: 2, hi: 99 }), slot!("_", Domain::Int { lo: 2, hi: 99 })] },
    Template { pattern: "what is {0} plus {1}", slots: &[slot!("_", Domain::Int { lo: 2, hi: 999 }), slot!("_", Domain::Int { lo: 2, hi: 999 })] },
    Template { pattern: "how many prime numbers are below {0}", slots: &[slot!("_", Domain::Int { lo: 10, hi: 500 })] },
    Template { pattern: "how do i boil an egg", slots: &[] },
    Template { pattern: "give me a recipe for {0}", slots: &[slot!("_", Domain::Words(&["pancakes", "lasagna", "ramen", "chili", "tiramisu"]))] },
    Template { pattern: "how long should i knead bread dough", slots: &[] },
    Template { pattern: "tell me a joke about {0}", slots: &[slot!("_", Domain::Words(&["cats", "penguins", "programmers", "pirates"]))] },
    Template { pattern: "what is the capital of {0}", slots: &[slot!("_", Domain::Words(&["France", "Japan", "Brazil", "Kenya", "Norway"]))] },
    Template { pattern: "who wrote the novel {0}", slots: &[slot!("_", Domain::Words(&["Moby Dick", "Dune", "Dracula", "Emma"]))] },
    Template { pattern: "why is the sky blue", slots: &[] },
    Template { pattern: "how tall is mount everest", slots: &[] },
    Template { pattern: "what year did the {0} end", slots: &[slot!("_", Domain::Words(&["roman empire", "ming dynasty", "bronze age"]))] },
    Template { pattern: "translate hello into {0}", slots: &[slot!("_", Domain::Words(&["spanish", "german", "korean", "swahili"]))] },
    Template { pattern: "recommend a good book about {0}", slots: &[slot!("_", Domain::Words(&["space", "history", "chess", "whales"]))] },
    Template { pattern: "how are you doing today", slots: &[] },
    Template { pattern: "what is the meaning of life", slots: &[] },
    Template { pattern: "do you believe in luck", slots: &[] },
    Template { pattern: "what should i name my goldfish", slots: &[] },
    Template { pattern: "who won the world cup in {0}", slots: &[slot!("_", Domain::Int { lo: 1990, hi: 2022 })] },
    Template { pattern: "explain photosynthesis in one sentence", slots: &[] },
    Template { pattern: "what is the square root of {0}", slots: &[slot!("_", Domain::Int { lo: 2, hi: 900 })] },
    Template { pattern: "how far away is the moon", slots: &[] },
];
