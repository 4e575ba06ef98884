public class ReverseVowels {
    static boolean isVowel(char c) {
        return "aeiouAEIOU".indexOf(c) >= 0;
    }

    public static int main(String[] args) {
        String s = "leetcode";
        char[] chars = s.toCharArray();
        int left = 0;
        int right = chars.length - 1;
        int swaps = 0;
        while (left < right) {
            if (!isVowel(chars[left])) {
                left++;
            } else if (!isVowel(chars[right])) {
                right--;
            } else {
                char tmp = chars[left];
                chars[left] = chars[right];
                chars[right] = tmp;
                left++;
                right--;
                swaps++;
            }
        }
        String result = new String(chars);
        int total = swaps * 100 + result.indexOf('o');
        return total;
    }
}
