/* Copyright 2026 The labeldisp Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <string>
#include <vector>

#include "labeldisp/embedding/embedding.hpp"

namespace labeldisp {

/// The 101 UCF101 action classes in their canonical 1-based order.
inline const ClassCatalog& ucf101_catalog() {
  static const ClassCatalog catalog(std::vector<std::string>{
      "Apply Eye Makeup",
      "Apply Lipstick",
      "Archery",
      "Baby Crawling",
      "Balance Beam",
      "Band Marching",
      "Baseball Pitch",
      "Basketball",
      "Basketball Dunk",
      "Bench Press",
      "Biking",
      "Billiards",
      "Blow Dry Hair",
      "Blowing Candles",
      "Body Weight Squats",
      "Bowling",
      "Boxing Punching Bag",
      "Boxing Speed Bag",
      "Breast Stroke",
      "Brushing Teeth",
      "Clean And Jerk",
      "Cliff Diving",
      "Cricket Bowling",
      "Cricket Shot",
      "Cutting In Kitchen",
      "Diving",
      "Drumming",
      "Fencing",
      "Field Hockey Penalty",
      "Floor Gymnastics",
      "Frisbee Catch",
      "Front Crawl",
      "Golf Swing",
      "Haircut",
      "Hammering",
      "Hammer Throw",
      "Handstand Pushups",
      "Handstand Walking",
      "Head Massage",
      "High Jump",
      "Horse Race",
      "Horse Riding",
      "Hula Hoop",
      "Ice Dancing",
      "Javelin Throw",
      "Juggling Balls",
      "Jumping Jack",
      "Jump Rope",
      "Kayaking",
      "Knitting",
      "Long Jump",
      "Lunges",
      "Military Parade",
      "Mixing",
      "Mopping Floor",
      "Nunchucks",
      "Parallel Bars",
      "Pizza Tossing",
      "Playing Cello",
      "Playing Daf",
      "Playing Dhol",
      "Playing Flute",
      "Playing Guitar",
      "Playing Piano",
      "Playing Sitar",
      "Playing Tabla",
      "Playing Violin",
      "Pole Vault",
      "Pommel Horse",
      "Pull Ups",
      "Punch",
      "Push Ups",
      "Rafting",
      "Rock Climbing Indoor",
      "Rope Climbing",
      "Rowing",
      "Salsa Spin",
      "Shaving Beard",
      "Shotput",
      "Skate Boarding",
      "Skiing",
      "Ski Jet",
      "Sky Diving",
      "Soccer Juggling",
      "Soccer Penalty",
      "Still Rings",
      "Sumo Wrestling",
      "Surfing",
      "Swing",
      "Table Tennis Shot",
      "Tai Chi",
      "Tennis Swing",
      "Throw Discus",
      "Trampoline Jumping",
      "Typing",
      "Uneven Bars",
      "Volleyball Spiking",
      "Walking With Dog",
      "Wall Pushups",
      "Writing On Board",
      "Yo Yo",
  });
  return catalog;
}

}  // namespace labeldisp
