// SPDX-License-Identifier: Apache-2.0
// Small grammar shared by the unit tests.
#pragma once

inline constexpr const char* kMiniGrammar = R"(; mini protocol
protocol mini

request {
  requestLine = Method:method:enum SP Target:target:lazy SP Version:version {
    mandatory Seq;
    Seq.method == requestLine.method
  }
}

response {
  statusLine = Version:version SP Code:code:uint16 SP Text:text {
    200 <= statusLine.code && statusLine.code < 300
  }
}

header Seq {"Seq" / "s"} = 1*DIGIT:number:uint32 SP Method:method:enum {
  Seq.number < 1000
}

header Tag = token:value *( SP token ) {
  multiple
}

Method  = "GET" / "PUT"
Target  = "/" *( ALPHA / "/" )
Version = "MINI/1"
Code    = 3DIGIT
Text    = *( VCHAR / SP )
token   = 1*( ALPHA / DIGIT / "-" )
)";
