# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Information-seeking question policies.

A questioner plays a guessing game over a scene of objects, asking attribute
questions until it guesses the hidden target. The questioner's policy is a
particle ensemble refined with Stein variational gradient descent, with
rewards shaped by an estimated information gain of each candidate question.
"""
